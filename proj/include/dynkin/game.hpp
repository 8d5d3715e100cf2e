#pragma once

#include <utility>

#include "dynkin/tree.hpp"

namespace dynkin {

/// Zero-sum stopping game data: the max player collects X when stopping
/// first, the min player pays Y when stopping first, simultaneous stops pay
/// Z. Terminal values of X and Y are irrelevant and are overwritten with Z
/// at construction (recorded in `terminal_adjusted`).
template <class S>
struct DynkinGame {
    FiltrationTree<S> tree;
    AdaptedProcess<S> x, y, z;
    std::vector<NodeId> terminal_adjusted;
    bool standard = false;

    static DynkinGame make(FiltrationTree<S> tree, AdaptedProcess<S> x, AdaptedProcess<S> y,
                           AdaptedProcess<S> z) {
        if (x.size() != tree.size() || y.size() != tree.size() || z.size() != tree.size())
            throw std::invalid_argument("payoff process size does not match tree");
        DynkinGame g{std::move(tree), std::move(x), std::move(y), std::move(z), {}, false};
        for (NodeId n = 0; n < g.tree.size(); ++n) {
            if (!g.tree.is_leaf(n)) continue;
            if (!Arith<S>::eq(g.x[n], g.z[n], g.tree.tolerance) ||
                !Arith<S>::eq(g.y[n], g.z[n], g.tree.tolerance))
                g.terminal_adjusted.push_back(n);
            g.x[n] = g.z[n];
            g.y[n] = g.z[n];
        }
        g.standard = check_standard(g);
        return g;
    }

    double tol() const { return tree.tolerance; }
};

/// True iff X <= Z <= Y at every node.
template <class S>
bool check_standard(const DynkinGame<S>& g) {
    for (NodeId n = 0; n < g.tree.size(); ++n)
        if (!Arith<S>::le(g.x[n], g.z[n], g.tol()) || !Arith<S>::le(g.z[n], g.y[n], g.tol()))
            return false;
    return true;
}

/// Effective payoff bounds L = min(X, Z), U = max(Y, Z); L <= Z <= U always.
template <class S>
std::pair<AdaptedProcess<S>, AdaptedProcess<S>> envelopes(const DynkinGame<S>& g) {
    return {pointwise_min(g.x, g.z), pointwise_max(g.y, g.z)};
}

/// The standard game carrying (L, U, Z) in place of (X, Y, Z).
template <class S>
DynkinGame<S> envelope_game(const DynkinGame<S>& g) {
    auto [l, u] = envelopes(g);
    return DynkinGame<S>::make(g.tree, std::move(l), std::move(u), g.z);
}

/// Payoff on one path: X at the tau node if tau realizes strictly first,
/// Y at the sigma node if sigma does, Z at the common node on a tie.
template <class S>
S realized_payoff(const DynkinGame<S>& g, const StoppingTime& tau, const StoppingTime& sigma,
                  NodeId leaf, NodeId start = 0) {
    std::vector<NodeId> path;
    for (NodeId n = leaf; n != kNoNode; n = g.tree.parent[n]) {
        path.push_back(n);
        if (n == start) break;
    }
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
        bool ts = tau.stops_at(*it), ss = sigma.stops_at(*it);
        if (ts && ss) return g.z[*it];
        if (ts) return g.x[*it];
        if (ss) return g.y[*it];
    }
    throw std::logic_error("no stop on path");
}

/// E(R(tau, sigma) | F_node): weighted average of the realized payoff over
/// all leaf paths through the node. Stop decisions above `node` are ignored.
/// One backward sweep over the subtree, no recursion.
template <class S>
S expected_payoff(const DynkinGame<S>& g, const StoppingTime& tau, const StoppingTime& sigma,
                  NodeId node) {
    AdaptedProcess<S> val(g.tree, Arith<S>::zero());
    for (NodeId n = g.tree.size() - 1; n >= node; --n) {
        if (!g.tree.in_subtree(n, node)) continue;
        bool ts = tau.stops_at(n), ss = sigma.stops_at(n);
        if (ts && ss) {
            val[n] = g.z[n];
        } else if (ts) {
            val[n] = g.x[n];
        } else if (ss) {
            val[n] = g.y[n];
        } else {
            S sum = Arith<S>::zero();
            for (NodeId c : g.tree.children[n]) sum = sum + g.tree.branch_prob[c] * val[c];
            val[n] = sum;
        }
    }
    return val[node];
}

/// Same game with float payoffs/probabilities; used to cross-check modes.
inline DynkinGame<double> to_float_game(const DynkinGame<Rational>& g) {
    FiltrationTree<double> t;
    t.horizon = g.tree.horizon;
    t.tolerance = g.tree.tolerance;
    t.add_root(g.tree.name[0]);
    for (NodeId n = 1; n < g.tree.size(); ++n)
        t.add_child(g.tree.parent[n], g.tree.name[n], g.tree.branch_prob[n].to_double());
    auto conv = [&](const AdaptedProcess<Rational>& p) {
        AdaptedProcess<double> out;
        out.values.reserve(p.values.size());
        for (const auto& v : p.values) out.values.push_back(v.to_double());
        return out;
    };
    return DynkinGame<double>::make(std::move(t), conv(g.x), conv(g.y), conv(g.z));
}

}  // namespace dynkin
