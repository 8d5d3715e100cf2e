#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "dynkin/oracle.hpp"

namespace dynkin {

struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Closed payoff catalog: named forms with parameters, no user code.
struct PayoffForm {
    enum class Kind { affine, call, put, constant };
    Kind kind = Kind::constant;
    double slope = 0, intercept = 0;  // affine
    double strike = 0;                // call / put
    double value = 0;                 // constant
    double shift = 0;                 // added to any form

    double eval(double /*t*/, double s) const {
        switch (kind) {
            case Kind::affine: return slope * s + intercept + shift;
            case Kind::call: return std::max(s - strike, 0.0) + shift;
            case Kind::put: return std::max(strike - s, 0.0) + shift;
            case Kind::constant: return value + shift;
        }
        return 0;
    }
};

/// Z is either its own form or a penalty shift of X or Y.
struct SimultaneousForm {
    enum class Kind { explicit_form, x_minus_delta, y_plus_delta };
    Kind kind = Kind::explicit_form;
    PayoffForm form;
    double delta = 0;
};

/// Fine time-grid approximation of a continuous-time game: a symmetric
/// random walk (increments +-sqrt(T/N)) or a recombining two-branch market
/// lattice with up/down factors and a fixed branch probability.
struct LatticeSpec {
    enum class Model { random_walk, market };
    Model model = Model::random_walk;
    double horizon_time = 1.0;
    int steps = 1;
    double s0 = 0;
    double up = 2.0, down = 0.5, p_up = 0.5;  // market model
    double tolerance = 1e-9;
    std::uint64_t node_budget = 2'000'000;
    PayoffForm x, y;
    SimultaneousForm z;

    void check() const {
        if (horizon_time <= 0) throw std::invalid_argument("horizon_time must be > 0");
        if (steps < 1) throw std::invalid_argument("steps must be >= 1");
        if (model == Model::market) {
            if (!(up > down && down > 0))
                throw std::invalid_argument("market model needs up > down > 0");
            if (!(p_up > 0 && p_up < 1))
                throw std::invalid_argument("branch probability must lie in (0,1)");
        }
        std::uint64_t states = std::uint64_t(steps + 1) * std::uint64_t(steps + 2) / 2;
        if (states > node_budget)
            throw BudgetExceeded("lattice needs " + std::to_string(states) +
                                 " states, budget is " + std::to_string(node_budget));
    }

    double state(int t, int ups) const {
        if (model == Model::random_walk)
            return s0 + (2.0 * ups - t) * std::sqrt(horizon_time / steps);
        return s0 * std::pow(up, ups) * std::pow(down, t - ups);
    }

    double prob_up() const { return model == Model::random_walk ? 0.5 : p_up; }
    double dt() const { return horizon_time / steps; }

    void payoffs_at(int t, int ups, double& xv, double& yv, double& zv) const {
        double tt = t * dt();
        double s = state(t, ups);
        xv = x.eval(tt, s);
        yv = y.eval(tt, s);
        switch (z.kind) {
            case SimultaneousForm::Kind::explicit_form: zv = z.form.eval(tt, s); break;
            case SimultaneousForm::Kind::x_minus_delta: zv = xv - z.delta; break;
            case SimultaneousForm::Kind::y_plus_delta: zv = yv + z.delta; break;
        }
    }
};

/// State-indexed (recombined) view: everything is a function of (t, #ups)
/// because catalog payoffs are path independent. grid[t] has t+1 entries.
struct RecombinedGame {
    int steps = 0;
    double p_up = 0.5;
    double dt = 0;
    double tolerance = 1e-9;
    std::vector<std::vector<double>> x, y, z;

    static RecombinedGame build(const LatticeSpec& spec) {
        spec.check();
        RecombinedGame g;
        g.steps = spec.steps;
        g.p_up = spec.prob_up();
        g.dt = spec.dt();
        g.tolerance = spec.tolerance;
        g.x.resize(spec.steps + 1);
        g.y.resize(spec.steps + 1);
        g.z.resize(spec.steps + 1);
        for (int t = 0; t <= spec.steps; ++t) {
            g.x[t].resize(t + 1);
            g.y[t].resize(t + 1);
            g.z[t].resize(t + 1);
            for (int j = 0; j <= t; ++j)
                spec.payoffs_at(t, j, g.x[t][j], g.y[t][j], g.z[t][j]);
        }
        for (int j = 0; j <= spec.steps; ++j) {  // terminal convention
            g.x[spec.steps][j] = g.z[spec.steps][j];
            g.y[spec.steps][j] = g.z[spec.steps][j];
        }
        return g;
    }
};

struct RecombinedValue {
    std::vector<std::vector<double>> v, l, u, cont;
};

inline RecombinedValue solve_recombined(const RecombinedGame& g) {
    RecombinedValue out;
    auto shape = [&](std::vector<std::vector<double>>& m) {
        m.resize(g.steps + 1);
        for (int t = 0; t <= g.steps; ++t) m[t].resize(t + 1);
    };
    shape(out.v);
    shape(out.l);
    shape(out.u);
    shape(out.cont);
    for (int t = g.steps; t >= 0; --t) {
        for (int j = 0; j <= t; ++j) {
            out.l[t][j] = std::min(g.x[t][j], g.z[t][j]);
            out.u[t][j] = std::max(g.y[t][j], g.z[t][j]);
            if (t == g.steps) {
                out.v[t][j] = g.z[t][j];
                out.cont[t][j] = g.z[t][j];
            } else {
                double c = g.p_up * out.v[t + 1][j + 1] + (1 - g.p_up) * out.v[t + 1][j];
                out.cont[t][j] = c;
                out.v[t][j] = std::min(out.u[t][j], std::max(out.l[t][j], c));
            }
        }
    }
    return out;
}

/// Stop/continue rule as a function of (t, #ups); forced stop at t = N.
struct LatticeRule {
    std::vector<std::vector<std::uint8_t>> stop;
    bool stops_at(int t, int j) const { return stop[t][j] != 0; }
};

struct LatticeRulePair {
    double epsilon = 0;
    LatticeRule tau, sigma;
};

/// First-hitting rules: sigma stops where U <= V + eps, tau where L >= V - eps.
/// eps = 0 gives the optimal pair; callers wanting eps-strategies must pass
/// eps > 0.
inline LatticeRulePair hitting_rules(const RecombinedGame& g, const RecombinedValue& val,
                                     double eps) {
    LatticeRulePair out;
    out.epsilon = eps;
    out.tau.stop.resize(g.steps + 1);
    out.sigma.stop.resize(g.steps + 1);
    for (int t = 0; t <= g.steps; ++t) {
        out.tau.stop[t].resize(t + 1);
        out.sigma.stop[t].resize(t + 1);
        for (int j = 0; j <= t; ++j) {
            bool leaf = t == g.steps;
            out.tau.stop[t][j] =
                (leaf || Arith<double>::le(val.v[t][j] - eps, val.l[t][j], g.tolerance)) ? 1 : 0;
            out.sigma.stop[t][j] =
                (leaf || Arith<double>::le(val.u[t][j], val.v[t][j] + eps, g.tolerance)) ? 1 : 0;
        }
    }
    return out;
}

inline LatticeRulePair epsilon_rules(const RecombinedGame& g, const RecombinedValue& val,
                                     double eps) {
    if (!(eps > 0)) throw std::invalid_argument("epsilon must be positive");
    return hitting_rules(g, val, eps);
}

/// Max player's best response value at (0,0) against a frozen sigma rule.
inline double br_max_recombined(const RecombinedGame& g, const LatticeRule& sigma) {
    std::vector<double> next(g.steps + 1), cur;
    for (int j = 0; j <= g.steps; ++j) next[j] = g.z[g.steps][j];
    for (int t = g.steps - 1; t >= 0; --t) {
        cur.assign(t + 1, 0.0);
        for (int j = 0; j <= t; ++j) {
            if (sigma.stops_at(t, j)) {
                cur[j] = std::max(g.z[t][j], g.y[t][j]);
            } else {
                double c = g.p_up * next[j + 1] + (1 - g.p_up) * next[j];
                cur[j] = std::max(g.x[t][j], c);
            }
        }
        next = cur;
        next.resize(t + 1);
    }
    return next[0];
}

inline double br_min_recombined(const RecombinedGame& g, const LatticeRule& tau) {
    std::vector<double> next(g.steps + 1), cur;
    for (int j = 0; j <= g.steps; ++j) next[j] = g.z[g.steps][j];
    for (int t = g.steps - 1; t >= 0; --t) {
        cur.assign(t + 1, 0.0);
        for (int j = 0; j <= t; ++j) {
            if (tau.stops_at(t, j)) {
                cur[j] = std::min(g.z[t][j], g.x[t][j]);
            } else {
                double c = g.p_up * next[j + 1] + (1 - g.p_up) * next[j];
                cur[j] = std::min(g.y[t][j], c);
            }
        }
        next = cur;
        next.resize(t + 1);
    }
    return next[0];
}

inline bool condition_holds_recombined(const RecombinedGame& g, const RecombinedValue& val) {
    for (int t = 0; t <= g.steps; ++t)
        for (int j = 0; j <= t; ++j) {
            double lo = std::min(g.x[t][j], g.y[t][j]);
            double hi = std::max(g.x[t][j], g.y[t][j]);
            double tol = g.tolerance * std::max({1.0, std::fabs(val.v[t][j])});
            if (val.v[t][j] < lo - tol || val.v[t][j] > hi + tol) return false;
        }
    return true;
}

/// One-step drift signs on the stopped intervals: before the tau rule stops
/// V must not exceed the continuation (submartingale), before the sigma rule
/// stops V must not fall below it. States are restricted to those reachable
/// from (0,0) without an earlier stop of the respective rule.
struct DriftReport {
    double max_sub_violation = 0;    // max(V - cont) on the tau interval
    double max_super_violation = 0;  // max(cont - V) on the sigma interval
    int violations_above_tol = 0;
};

inline DriftReport drift_report(const RecombinedGame& g, const RecombinedValue& val,
                                const LatticeRulePair& pair) {
    DriftReport rep;
    auto sweep = [&](const LatticeRule& rule, bool submartingale) {
        std::vector<std::vector<std::uint8_t>> live(g.steps + 1);
        for (int t = 0; t <= g.steps; ++t) live[t].assign(t + 1, 0);
        if (rule.stops_at(0, 0)) return;
        live[0][0] = 1;
        for (int t = 0; t < g.steps; ++t)
            for (int j = 0; j <= t; ++j) {
                if (!live[t][j]) continue;
                double drift = submartingale ? val.v[t][j] - val.cont[t][j]
                                             : val.cont[t][j] - val.v[t][j];
                double tol = g.tolerance * std::max({1.0, std::fabs(val.v[t][j])});
                auto& worst = submartingale ? rep.max_sub_violation : rep.max_super_violation;
                worst = std::max(worst, drift);
                if (drift > tol) ++rep.violations_above_tol;
                for (int nj : {j, j + 1})
                    if (t + 1 < g.steps + 1 && !rule.stops_at(t + 1, nj)) live[t + 1][nj] = 1;
            }
    };
    sweep(pair.tau, true);
    sweep(pair.sigma, false);
    return rep;
}

/// E[stop time] from (0,0), in lattice time units (k * dt).
inline double expected_stop_time(const RecombinedGame& g, const LatticeRule& rule) {
    std::vector<std::vector<double>> e(g.steps + 1);
    for (int t = g.steps; t >= 0; --t) {
        e[t].assign(t + 1, 0.0);
        for (int j = 0; j <= t; ++j) {
            if (t == g.steps || rule.stops_at(t, j))
                e[t][j] = t * g.dt;
            else
                e[t][j] = g.p_up * e[t + 1][j + 1] + (1 - g.p_up) * e[t + 1][j];
        }
    }
    return e[0][0];
}

/// Expanded tree view of the lattice, for oracle cross-checks at small N.
DynkinGame<double> build_lattice(const LatticeSpec& spec);

// --- tree-form counterparts of the hitting constructions -------------------

template <class S>
struct EpsilonStrategyPair {
    S epsilon{};
    StoppingTime tau, sigma;
};

/// Def-style first-hitting pair on a tree game: sigma stops where
/// U <= V + eps, tau where L >= V - eps. Requires eps > 0; the eps = 0 maps
/// are exactly optimal_stopping_times.
template <class S>
EpsilonStrategyPair<S> epsilon_strategies(const DynkinGame<S>& g, const ValueProcess<S>& vp,
                                          const S& eps) {
    if (!Arith<S>::lt(Arith<S>::zero(), eps, g.tol()))
        throw std::invalid_argument("epsilon must be positive");
    EpsilonStrategyPair<S> out;
    out.epsilon = eps;
    std::vector<std::uint8_t> ts(g.tree.size(), 0), ss(g.tree.size(), 0);
    for (NodeId n = 0; n < g.tree.size(); ++n) {
        ts[n] = Arith<S>::le(vp.v[n] - eps, vp.l[n], g.tol()) ? 1 : 0;
        ss[n] = Arith<S>::le(vp.u[n], vp.v[n] + eps, g.tol()) ? 1 : 0;
    }
    out.tau = StoppingTime::make(g.tree, std::move(ts));
    out.sigma = StoppingTime::make(g.tree, std::move(ss));
    return out;
}

template <class S>
struct EpsilonCertificate {
    bool applicable = false;  // equilibrium condition holds everywhere
    bool certified = false;
    S br_max{}, br_min{}, gap_max{}, gap_min{};
    EquilibriumConditionReport<S> condition;
};

/// Best-response certification of an eps-pair at `start`; not applicable when
/// the equilibrium condition fails (then some eps admits no eps-optimal
/// strategies at all).
template <class S>
EpsilonCertificate<S> verify_epsilon_optimality(const DynkinGame<S>& g,
                                                const ValueProcess<S>& vp,
                                                const EpsilonStrategyPair<S>& pair,
                                                NodeId start) {
    EpsilonCertificate<S> cert;
    cert.condition = check_equilibrium_condition(g, vp);
    cert.applicable = cert.condition.holds_everywhere;
    if (!cert.applicable) return cert;
    cert.br_max = best_response_max(g, pair.sigma, start).value;
    cert.br_min = best_response_min(g, pair.tau, start).value;
    cert.gap_max = cert.br_max - vp.v[start];
    cert.gap_min = vp.v[start] - cert.br_min;
    cert.certified = Arith<S>::le(cert.gap_max, pair.epsilon, g.tol()) &&
                     Arith<S>::le(cert.gap_min, pair.epsilon, g.tol());
    return cert;
}

template <class S>
struct MartingaleStructureReport {
    S max_sub_violation{};    // max(V - continuation) before the tau stop
    S max_super_violation{};  // max(continuation - V) before the sigma stop
    int violations_above_tol = 0;
};

template <class S>
MartingaleStructureReport<S> martingale_structure(const DynkinGame<S>& g,
                                                  const ValueProcess<S>& vp,
                                                  const EpsilonStrategyPair<S>& pair,
                                                  NodeId start) {
    MartingaleStructureReport<S> rep;
    auto sweep = [&](const StoppingTime& rule, bool submartingale) {
        std::vector<std::uint8_t> live(g.tree.size(), 0);
        for (NodeId n = start; n < g.tree.size(); ++n) {
            if (n == start) {
                if (!g.tree.in_subtree(n, start)) continue;
                live[n] = 1;
            } else if (!g.tree.in_subtree(n, start) || !live[g.tree.parent[n]]) {
                continue;
            } else {
                live[n] = 1;
            }
            if (rule.stops_at(n)) {
                live[n] = 0;
                continue;
            }
            if (g.tree.is_leaf(n)) continue;
            S drift = submartingale ? vp.v[n] - vp.continuation[n]
                                    : vp.continuation[n] - vp.v[n];
            auto& worst = submartingale ? rep.max_sub_violation : rep.max_super_violation;
            worst = scalar_max(worst, drift);
            if (!Arith<S>::le(drift, Arith<S>::zero(), g.tol())) ++rep.violations_above_tol;
        }
    };
    sweep(pair.tau, true);
    sweep(pair.sigma, false);
    return rep;
}

/// Earlier-stop truncation of a Nash pair of the (L, U, Z) standard game by
/// the zero-hitting times, re-certified as a Nash pair of the original game.
template <class S>
std::pair<StoppingTime, StoppingTime> truncate_equilibrium(const DynkinGame<S>& g,
                                                           const ValueProcess<S>& vp,
                                                           const StoppingTime& tau,
                                                           const StoppingTime& sigma,
                                                           NodeId start = 0) {
    DynkinGame<S> env = envelope_game(g);
    if (!is_nash(env, tau, sigma, start))
        throw std::invalid_argument("input pair is not a Nash pair of the (L,U,Z) game");
    auto [tau0, sigma0] = optimal_stopping_times(g, vp);
    StoppingTime t_out = tau, s_out = sigma;
    for (NodeId n = 0; n < g.tree.size(); ++n) {
        t_out.stop[n] = t_out.stop[n] | tau0.stop[n];  // pointwise-earlier stop
        s_out.stop[n] = s_out.stop[n] | sigma0.stop[n];
    }
    if (!is_nash(g, t_out, s_out, start))
        throw std::logic_error("truncated pair failed re-certification for the original game");
    return {std::move(t_out), std::move(s_out)};
}

// --- convergence study -----------------------------------------------------

struct StudyRow {
    int steps = 0;
    double epsilon = 0;
    double value_root = 0;
    double gap_max = 0, gap_min = 0;
    double e_tau = 0, e_sigma = 0;
    bool condition_ok = false;
    double runtime_ms = 0;
};

std::vector<StudyRow> convergence_study(const LatticeSpec& spec,
                                        const std::vector<double>& epsilons,
                                        const std::vector<int>& steps);

std::string study_csv(const std::vector<StudyRow>& rows);

LatticeSpec parse_lattice_spec(const std::string& json_text);

std::string lattice_report(const LatticeSpec& spec, const std::vector<double>& epsilons,
                           const std::vector<int>& steps, const std::vector<StudyRow>& rows);

}  // namespace dynkin
