#pragma once

#include <random>

#include "dynkin/game.hpp"

namespace dynkin {

/// mt19937_64 is fully specified by the standard; drawing through rejection
/// sampling (never std::uniform_int_distribution, which is
/// implementation-defined) keeps generated files identical across toolchains.
class DeterministicRng {
public:
    explicit DeterministicRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, n).
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() / n * n;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

    long long range(long long lo, long long hi) {  // inclusive
        return lo + (long long)below(std::uint64_t(hi - lo + 1));
    }

private:
    std::mt19937_64 engine_;
};

enum class PayoffMode { standard, general, z_between };

inline const char* to_string(PayoffMode m) {
    switch (m) {
        case PayoffMode::standard: return "standard";
        case PayoffMode::general: return "general";
        default: return "z-between";
    }
}

inline PayoffMode payoff_mode_from_string(const std::string& s) {
    if (s == "standard") return PayoffMode::standard;
    if (s == "general") return PayoffMode::general;
    if (s == "z-between" || s == "z_between") return PayoffMode::z_between;
    throw std::invalid_argument("unknown payoff mode '" + s + "'");
}

struct GeneratorConfig {
    std::uint64_t seed = 1;
    int max_depth = 4;
    int max_branch = 3;
    PayoffMode mode = PayoffMode::general;
    int max_internal_nodes = 12;  // keeps 2^k enumeration far under the oracle cap
    long long payoff_lo = -9, payoff_hi = 9;
};

/// One reproducible game per call. Level widths are drawn first under the
/// internal-node budget, then children and edge probabilities (small exact
/// fractions) are distributed, then payoffs per mode:
///   standard   three draws sorted into X <= Z <= Y
///   z-between  Z clamped into [min(X,Y), max(X,Y)]
///   general    free draws
template <class S = Rational>
DynkinGame<S> generate_game(const GeneratorConfig& cfg, DeterministicRng& rng) {
    int depth = int(rng.range(1, cfg.max_depth));

    std::vector<int> width(depth + 1, 1);
    int internals = 1;
    for (int t = 1; t <= depth; ++t) {
        int lo = width[t - 1];
        int hi = width[t - 1] * cfg.max_branch;
        if (t < depth) {
            int levels_left = depth - t;  // this level's nodes are internal
            int budget = (cfg.max_internal_nodes - internals) / levels_left;
            hi = std::min(hi, std::max(lo, budget));
        }
        width[t] = int(rng.range(lo, std::max(lo, hi)));
        if (t < depth) internals += width[t];
    }

    FiltrationTree<S> tree;
    tree.horizon = depth;
    tree.add_root("n0");
    int counter = 1;
    std::vector<NodeId> level{tree.root()};
    for (int t = 1; t <= depth; ++t) {
        // Every parent gets one child; extras go to random parents under the cap.
        std::vector<int> kids(level.size(), 1);
        int extras = width[t] - int(level.size());
        while (extras > 0) {
            int p = int(rng.below(level.size()));
            if (kids[p] < cfg.max_branch) {
                ++kids[p];
                --extras;
            }
        }
        std::vector<NodeId> next;
        for (size_t p = 0; p < level.size(); ++p) {
            std::vector<long long> weight(kids[p]);
            long long total = 0;
            for (auto& w : weight) {
                w = rng.range(1, 4);
                total += w;
            }
            for (int k = 0; k < kids[p]; ++k) {
                S prob = Arith<S>::from_int(weight[k]) / Arith<S>::from_int(total);
                next.push_back(tree.add_child(level[p], "n" + std::to_string(counter++), prob));
            }
        }
        level = std::move(next);
    }

    AdaptedProcess<S> x(tree, Arith<S>::zero()), y(tree, Arith<S>::zero()),
        z(tree, Arith<S>::zero());
    for (NodeId n = 0; n < tree.size(); ++n) {
        long long a = rng.range(cfg.payoff_lo, cfg.payoff_hi);
        long long b = rng.range(cfg.payoff_lo, cfg.payoff_hi);
        long long c = rng.range(cfg.payoff_lo, cfg.payoff_hi);
        if (tree.is_leaf(n)) {
            x[n] = y[n] = z[n] = Arith<S>::from_int(a);
            continue;
        }
        switch (cfg.mode) {
            case PayoffMode::standard: {
                long long lo = std::min({a, b, c}), hi = std::max({a, b, c});
                x[n] = Arith<S>::from_int(lo);
                z[n] = Arith<S>::from_int(a + b + c - lo - hi);
                y[n] = Arith<S>::from_int(hi);
                break;
            }
            case PayoffMode::z_between: {
                long long lo = std::min(a, b), hi = std::max(a, b);
                x[n] = Arith<S>::from_int(a);
                y[n] = Arith<S>::from_int(b);
                z[n] = Arith<S>::from_int(std::clamp(c, lo, hi));
                break;
            }
            case PayoffMode::general:
                x[n] = Arith<S>::from_int(a);
                y[n] = Arith<S>::from_int(b);
                z[n] = Arith<S>::from_int(c);
                break;
        }
    }
    return DynkinGame<S>::make(std::move(tree), std::move(x), std::move(y), std::move(z));
}

}  // namespace dynkin
