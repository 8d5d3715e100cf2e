#pragma once


#include "dynkin/game.hpp"

namespace dynkin {

/// Backward-induction value V together with the envelopes and the
/// materialized one-step continuation E(V_{t+1} | F_t). The continuation is
/// stored (not recomputed) so every consumer compares identical numbers;
/// entries at leaves are unused.
template <class S>
struct ValueProcess {
    AdaptedProcess<S> v, l, u, continuation;
};

/// Leaf-to-root evaluation of V = min{U, max{L, E(V_{t+1}|F_t)}} with
/// V_T = Z_T. For standard games this is the classic recursion in (X, Y).
template <class S>
ValueProcess<S> compute_value(const DynkinGame<S>& g) {
    ValueProcess<S> out;
    auto [l, u] = envelopes(g);
    out.l = std::move(l);
    out.u = std::move(u);
    out.v = AdaptedProcess<S>(g.tree, Arith<S>::zero());
    out.continuation = AdaptedProcess<S>(g.tree, Arith<S>::zero());
    for (NodeId n = g.tree.size() - 1; n >= 0; --n) {
        if (g.tree.is_leaf(n)) {
            out.v[n] = g.z[n];
            out.continuation[n] = g.z[n];
            continue;
        }
        S c = conditional_expectation(g.tree, out.v, n);
        out.continuation[n] = c;
        out.v[n] = scalar_min(out.u[n], scalar_max(out.l[n], c));
    }
    return out;
}

/// First hits of V = L (max player) and V = U (min player), as global stop
/// maps; the realized time from any start node is the first hit on the path.
template <class S>
std::pair<StoppingTime, StoppingTime> optimal_stopping_times(const DynkinGame<S>& g,
                                                             const ValueProcess<S>& vp) {
    std::vector<std::uint8_t> ts(g.tree.size(), 0), ss(g.tree.size(), 0);
    for (NodeId n = 0; n < g.tree.size(); ++n) {
        ts[n] = Arith<S>::eq(vp.v[n], vp.l[n], g.tol()) ? 1 : 0;
        ss[n] = Arith<S>::eq(vp.v[n], vp.u[n], g.tol()) ? 1 : 0;
    }
    return {StoppingTime::make(g.tree, std::move(ts)), StoppingTime::make(g.tree, std::move(ss))};
}

/// Nodes where V escapes the band [min(X,Y), max(X,Y)]. An empty report is
/// exactly the condition under which every subgame has a Nash equilibrium.
template <class S>
struct EquilibriumConditionReport {
    enum class Kind { below_min, above_max };
    struct Violation {
        NodeId node;
        Kind kind;
        S gap;
    };
    bool holds_everywhere = true;
    std::vector<Violation> violations;
};

template <class S>
EquilibriumConditionReport<S> check_equilibrium_condition(const DynkinGame<S>& g,
                                                          const ValueProcess<S>& vp) {
    EquilibriumConditionReport<S> rep;
    for (NodeId n = 0; n < g.tree.size(); ++n) {
        S lo = scalar_min(g.x[n], g.y[n]);
        S hi = scalar_max(g.x[n], g.y[n]);
        if (!Arith<S>::le(lo, vp.v[n], g.tol()))
            rep.violations.push_back({n, EquilibriumConditionReport<S>::Kind::below_min, lo - vp.v[n]});
        else if (!Arith<S>::le(vp.v[n], hi, g.tol()))
            rep.violations.push_back({n, EquilibriumConditionReport<S>::Kind::above_max, vp.v[n] - hi});
    }
    rep.holds_everywhere = rep.violations.empty();
    return rep;
}

/// One-step equilibrium test at an internal node for a given stop profile:
///   both stop        Y <= V = Z <= X
///   max stops only   P <= V = X <= Z
///   min stops only   Z <= V = Y <= P
///   neither stops    X <= V = P <= Y
/// with P the materialized continuation.
template <class S>
bool one_step_equilibrium_conditions(const DynkinGame<S>& g, const ValueProcess<S>& vp,
                                     NodeId node, bool tau_stops, bool sigma_stops) {
    if (g.tree.is_leaf(node)) throw std::invalid_argument("one-step test needs an internal node");
    const double tol = g.tol();
    const S& v = vp.v[node];
    const S& p = vp.continuation[node];
    if (tau_stops && sigma_stops)
        return Arith<S>::le(g.y[node], v, tol) && Arith<S>::eq(v, g.z[node], tol) &&
               Arith<S>::le(v, g.x[node], tol);
    if (tau_stops)
        return Arith<S>::le(p, v, tol) && Arith<S>::eq(v, g.x[node], tol) &&
               Arith<S>::le(v, g.z[node], tol);
    if (sigma_stops)
        return Arith<S>::le(g.z[node], v, tol) && Arith<S>::eq(v, g.y[node], tol) &&
               Arith<S>::le(v, p, tol);
    return Arith<S>::le(g.x[node], v, tol) && Arith<S>::eq(v, p, tol) &&
           Arith<S>::le(v, g.y[node], tol);
}

/// Direct evaluation of the Z = Y special case,
///   V_t = Y_t            if Y_t <= X_t
///       = min{Y_t, max{X_t, E(V_{t+1}|F_t)}}   otherwise,
/// which must agree with compute_value node for node.
template <class S>
AdaptedProcess<S> z_equals_y_recursion(const DynkinGame<S>& g) {
    for (NodeId n = 0; n < g.tree.size(); ++n)
        if (!Arith<S>::eq(g.z[n], g.y[n], g.tol()))
            throw std::invalid_argument("recursion requires Z = Y at every node (differs at '" +
                                        g.tree.name[n] + "')");
    AdaptedProcess<S> v(g.tree, Arith<S>::zero());
    for (NodeId n = g.tree.size() - 1; n >= 0; --n) {
        if (g.tree.is_leaf(n)) {
            v[n] = g.z[n];
        } else if (Arith<S>::le(g.y[n], g.x[n], g.tol())) {
            v[n] = g.y[n];
        } else {
            S c = conditional_expectation(g.tree, v, n);
            v[n] = scalar_min(g.y[n], scalar_max(g.x[n], c));
        }
    }
    return v;
}

/// Max |V - continuation| over internal nodes of the start subtree that the
/// pair min(tau, sigma) has not yet stopped at or before. Zero certifies the
/// stopped value process as a martingale.
template <class S>
S martingale_deviation(const DynkinGame<S>& g, const ValueProcess<S>& vp, const StoppingTime& tau,
                       const StoppingTime& sigma, NodeId start) {
    S worst = Arith<S>::zero();
    std::vector<std::uint8_t> live(g.tree.size(), 0);
    for (NodeId n = start; n < g.tree.size(); ++n) {
        if (n == start)
            live[n] = g.tree.in_subtree(n, start) ? 1 : 0;
        else if (!g.tree.in_subtree(n, start) || !live[g.tree.parent[n]])
            continue;
        else
            live[n] = 1;
        if (tau.stops_at(n) || sigma.stops_at(n)) {
            live[n] = 0;  // frozen from here on
            continue;
        }
        if (g.tree.is_leaf(n)) continue;
        S dev = Arith<S>::abs(vp.v[n] - vp.continuation[n]);
        worst = scalar_max(worst, dev);
    }
    return worst;
}

}  // namespace dynkin
