#pragma once

#include <cstdint>
#include <optional>

#include "dynkin/solver.hpp"

namespace dynkin {

template <class S>
struct BestResponse {
    S value;
    StoppingTime strategy;
};

/// Value and strategy of the max player against a frozen sigma: the Snell
/// envelope of the stopped payoff, by backward induction on the subtree.
/// Where sigma stops the local choice is stop-together (Z) vs being stopped
/// (Y); elsewhere it is stop (X) vs continue. Ties prefer stopping.
template <class S>
BestResponse<S> best_response_max(const DynkinGame<S>& g, const StoppingTime& sigma,
                                  NodeId start) {
    AdaptedProcess<S> q(g.tree, Arith<S>::zero());
    StoppingTime tau = StoppingTime::everywhere(g.tree);
    for (NodeId n = g.tree.size() - 1; n >= start; --n) {
        if (!g.tree.in_subtree(n, start)) continue;
        if (g.tree.is_leaf(n)) {
            q[n] = g.z[n];
            continue;
        }
        if (sigma.stops_at(n)) {
            bool stop = Arith<S>::le(g.y[n], g.z[n], g.tol());
            q[n] = stop ? g.z[n] : g.y[n];
            tau.stop[n] = stop ? 1 : 0;
        } else {
            S c = conditional_expectation(g.tree, q, n);
            bool stop = Arith<S>::le(c, g.x[n], g.tol());
            q[n] = stop ? g.x[n] : c;
            tau.stop[n] = stop ? 1 : 0;
        }
    }
    return {q[start], std::move(tau)};
}

template <class S>
BestResponse<S> best_response_min(const DynkinGame<S>& g, const StoppingTime& tau, NodeId start) {
    AdaptedProcess<S> q(g.tree, Arith<S>::zero());
    StoppingTime sigma = StoppingTime::everywhere(g.tree);
    for (NodeId n = g.tree.size() - 1; n >= start; --n) {
        if (!g.tree.in_subtree(n, start)) continue;
        if (g.tree.is_leaf(n)) {
            q[n] = g.z[n];
            continue;
        }
        if (tau.stops_at(n)) {
            bool stop = Arith<S>::le(g.z[n], g.x[n], g.tol());
            q[n] = stop ? g.z[n] : g.x[n];
            sigma.stop[n] = stop ? 1 : 0;
        } else {
            S c = conditional_expectation(g.tree, q, n);
            bool stop = Arith<S>::le(g.y[n], c, g.tol());
            q[n] = stop ? g.y[n] : c;
            sigma.stop[n] = stop ? 1 : 0;
        }
    }
    return {q[start], std::move(sigma)};
}

/// Neither player can improve by unilateral deviation.
template <class S>
bool is_nash(const DynkinGame<S>& g, const StoppingTime& tau, const StoppingTime& sigma,
             NodeId start) {
    S e = expected_payoff(g, tau, sigma, start);
    if (!Arith<S>::eq(e, best_response_max(g, sigma, start).value, g.tol())) return false;
    return Arith<S>::eq(e, best_response_min(g, tau, start).value, g.tol());
}

/// Exhaustive game value at a node: only the inner player is enumerated, the
/// outer optimization is a best response. Achiever masks are kept (capped)
/// so Nash pairs can be reconstructed as maximin x minimax products.
template <class S>
struct MinimaxReport {
    NodeId node = 0;
    S maximin{}, minimax{}, value_candidate{}, epsilon_star{};
    bool has_value = false;
    std::vector<std::uint64_t> maximin_taus, minimax_sigmas;  // first kAchieverCap each
    std::uint64_t tau_count = 0, sigma_count = 0;             // total achievers
};

inline constexpr std::size_t kAchieverCap = 1024;

template <class S>
MinimaxReport<S> brute_force_minimax(const DynkinGame<S>& g, const ValueProcess<S>& vp,
                                     NodeId start, std::uint64_t cap = kDefaultEnumerationCap) {
    MinimaxReport<S> rep;
    rep.node = start;
    rep.value_candidate = vp.v[start];
    bool first = true;
    for_each_stopping_time<S>(
        g.tree, start,
        [&](std::uint64_t mask, const StoppingTime& st) {
            S up = best_response_max(g, st, start).value;   // st as sigma
            S down = best_response_min(g, st, start).value; // st as tau
            if (!first && Arith<S>::eq(up, rep.minimax, g.tol())) {
                if (rep.minimax_sigmas.size() < kAchieverCap) rep.minimax_sigmas.push_back(mask);
                ++rep.sigma_count;
            } else if (first || up < rep.minimax) {
                rep.minimax = up;
                rep.minimax_sigmas.assign(1, mask);
                rep.sigma_count = 1;
            }
            if (!first && Arith<S>::eq(down, rep.maximin, g.tol())) {
                if (rep.maximin_taus.size() < kAchieverCap) rep.maximin_taus.push_back(mask);
                ++rep.tau_count;
            } else if (first || down > rep.maximin) {
                rep.maximin = down;
                rep.maximin_taus.assign(1, mask);
                rep.tau_count = 1;
            }
            first = false;
        },
        cap);
    rep.has_value = Arith<S>::eq(rep.maximin, rep.minimax, g.tol());
    rep.epsilon_star = rep.minimax - rep.maximin;
    // The backward-induction value always sits between the two; anything
    // else is a bug, not a property of the game.
    if (!Arith<S>::le(rep.maximin, rep.value_candidate, g.tol()) ||
        !Arith<S>::le(rep.value_candidate, rep.minimax, g.tol()))
        throw std::logic_error("minimax sandwich violated at node '" + g.tree.name[start] + "'");
    return rep;
}

enum class NashVerdict { nash_exists, epsilon_only, none_within_cap };

inline const char* to_string(NashVerdict v) {
    switch (v) {
        case NashVerdict::nash_exists: return "nash_exists";
        case NashVerdict::epsilon_only: return "epsilon_only";
        default: return "none_within_cap";
    }
}

/// Refutation evidence: a unilateral deviation that strictly improves.
template <class S>
struct Deviation {
    bool by_max_player = false;
    StoppingTime deviation;
    S baseline, improved;  // payoff of the tested pair vs after deviating
};

template <class S>
struct EquilibriumCertificate {
    NodeId node = 0;
    NashVerdict verdict = NashVerdict::none_within_cap;
    std::optional<std::pair<StoppingTime, StoppingTime>> strategies;
    std::optional<Deviation<S>> witness;
    std::optional<S> epsilon_star;  // minimax - maximin when known
};

/// Searches for a Nash pair at `start`: the first-hitting candidates are
/// certified first (they succeed whenever the equilibrium condition holds),
/// full enumeration is the fallback that also powers refutation witnesses.
template <class S>
EquilibriumCertificate<S> find_nash(const DynkinGame<S>& g, const ValueProcess<S>& vp,
                                    NodeId start, std::uint64_t cap = kDefaultEnumerationCap) {
    EquilibriumCertificate<S> cert;
    cert.node = start;
    auto [tau_star, sigma_star] = optimal_stopping_times(g, vp);

    S e = expected_payoff(g, tau_star, sigma_star, start);
    auto brx = best_response_max(g, sigma_star, start);
    auto brn = best_response_min(g, tau_star, start);
    if (Arith<S>::eq(e, brx.value, g.tol()) && Arith<S>::eq(e, brn.value, g.tol())) {
        cert.verdict = NashVerdict::nash_exists;
        cert.strategies = {tau_star, sigma_star};
        cert.epsilon_star = Arith<S>::zero();
        return cert;
    }
    // The candidate pair failed, so one side deviates strictly.
    Deviation<S> dev;
    if (brx.value > e) {
        dev = {true, brx.strategy, e, brx.value};
    } else {
        dev = {false, brn.strategy, e, brn.value};
    }
    cert.witness = dev;

    MinimaxReport<S> mm;
    try {
        mm = brute_force_minimax(g, vp, start, cap);
    } catch (const CapExceeded&) {
        cert.verdict = NashVerdict::none_within_cap;
        return cert;
    }
    cert.epsilon_star = mm.epsilon_star;
    if (mm.has_value) {
        // A maximin tau against a minimax sigma is a Nash pair (exact mode:
        // its payoff is squeezed between the two best responses).
        StoppingTime tau = stopping_time_from_mask(g.tree, start, mm.maximin_taus.front());
        StoppingTime sigma = stopping_time_from_mask(g.tree, start, mm.minimax_sigmas.front());
        if (is_nash(g, tau, sigma, start)) {
            cert.verdict = NashVerdict::nash_exists;
            cert.strategies = {std::move(tau), std::move(sigma)};
            cert.witness.reset();
            return cert;
        }
    }
    cert.verdict = NashVerdict::epsilon_only;
    return cert;
}

/// tau_hat copies sigma at nodes where sigma realizes strictly before tau
/// and Z > Y there; the trigger is decided at the node itself, so tau_hat
/// is a genuine stopping time. Pathwise it dominates the (L, U, Z) payoff.
template <class S>
StoppingTime improve_strategy(const DynkinGame<S>& g, const StoppingTime& tau,
                              const StoppingTime& sigma) {
    std::vector<std::uint8_t> tau_at_or_above(g.tree.size(), 0), sigma_above(g.tree.size(), 0);
    for (NodeId n = 0; n < g.tree.size(); ++n) {
        NodeId p = g.tree.parent[n];
        if (p != kNoNode) {
            tau_at_or_above[n] = tau_at_or_above[p] || tau.stops_at(p);
            sigma_above[n] = sigma_above[p] || sigma.stops_at(p);
        }
    }
    StoppingTime out = tau;
    for (NodeId n = 0; n < g.tree.size(); ++n) {
        if (out.stops_at(n)) continue;
        bool sigma_first = sigma.stops_at(n) && !sigma_above[n] && !tau_at_or_above[n];
        if (sigma_first && !Arith<S>::le(g.z[n], g.y[n], g.tol())) out.stop[n] = 1;
    }
    return out;
}

/// Two-sided epsilon-optimality of a pair at a node, via best responses.
template <class S>
bool certify_epsilon(const DynkinGame<S>& g, const ValueProcess<S>& vp, const StoppingTime& tau,
                     const StoppingTime& sigma, NodeId start, const S& epsilon) {
    if (!Arith<S>::le(Arith<S>::zero(), epsilon, g.tol()))
        throw std::invalid_argument("epsilon must be >= 0");
    S lo = best_response_min(g, tau, start).value;
    S hi = best_response_max(g, sigma, start).value;
    return Arith<S>::le(vp.v[start] - epsilon, lo, g.tol()) &&
           Arith<S>::le(hi, vp.v[start] + epsilon, g.tol());
}

/// Independent two-sided check of the equivalence
///   (V between min(X,Y) and max(X,Y) at every node)
///     <=> (a Nash equilibrium exists at every node).
template <class S>
struct EquivalenceCheck {
    bool condition_everywhere = false;
    bool nash_everywhere = false;
    bool agree = false;
    std::optional<NodeId> offending_node;  // set when the sides disagree
};

template <class S>
EquivalenceCheck<S> check_nash_equivalence(const DynkinGame<S>& g, const ValueProcess<S>& vp,
                                           std::uint64_t cap = kDefaultEnumerationCap) {
    EquivalenceCheck<S> out;
    auto cond = check_equilibrium_condition(g, vp);
    out.condition_everywhere = cond.holds_everywhere;
    out.nash_everywhere = true;
    std::optional<NodeId> first_no_nash;
    for (NodeId n = 0; n < g.tree.size(); ++n) {
        auto cert = find_nash(g, vp, n, cap);
        if (cert.verdict == NashVerdict::none_within_cap)
            throw CapExceeded("equivalence check exceeded enumeration cap at node '" +
                              g.tree.name[n] + "'");
        if (cert.verdict != NashVerdict::nash_exists) {
            out.nash_everywhere = false;
            if (!first_no_nash) first_no_nash = n;
        }
    }
    out.agree = out.condition_everywhere == out.nash_everywhere;
    if (!out.agree)
        out.offending_node = first_no_nash ? *first_no_nash : cond.violations.front().node;
    return out;
}

}  // namespace dynkin
