#pragma once

#include "dynkin/game.hpp"
#include "dynkin/generator.hpp"

namespace dynkin::testfix {

/// Root with payoff triple (x0, y0, z0) and two equiprobable leaves carrying
/// terminal values zl and zr. The workhorse single-period fixture:
///   (1, 5, 3) continuation is interior, both players wait
///   (5, 1, 3) collapsed envelopes, both stop immediately
///   (5, 4, 0) no value at the root (maximin 2 < minimax 4)
template <class S = Rational>
DynkinGame<S> two_leaf_game(long long x0, long long y0, long long z0, long long zl = 0,
                            long long zr = 4) {
    FiltrationTree<S> tree;
    tree.horizon = 1;
    NodeId root = tree.add_root("n0");
    tree.add_child(root, "n1", Arith<S>::from_int(1) / Arith<S>::from_int(2));
    tree.add_child(root, "n2", Arith<S>::from_int(1) / Arith<S>::from_int(2));
    AdaptedProcess<S> x(tree, Arith<S>::zero()), y(tree, Arith<S>::zero()),
        z(tree, Arith<S>::zero());
    x[0] = Arith<S>::from_int(x0);
    y[0] = Arith<S>::from_int(y0);
    z[0] = Arith<S>::from_int(z0);
    for (NodeId n : {1, 2}) {
        long long v = n == 1 ? zl : zr;
        x[n] = y[n] = z[n] = Arith<S>::from_int(v);
    }
    return DynkinGame<S>::make(std::move(tree), std::move(x), std::move(y), std::move(z));
}

inline DynkinGame<Rational> no_equilibrium_fixture() { return two_leaf_game<Rational>(5, 4, 0); }

/// Single node at horizon 0.
template <class S = Rational>
DynkinGame<S> trivial_game(long long v) {
    FiltrationTree<S> tree;
    tree.horizon = 0;
    tree.add_root("n0");
    AdaptedProcess<S> p(tree, Arith<S>::from_int(v));
    return DynkinGame<S>::make(std::move(tree), p, p, p);
}

inline DynkinGame<Rational> random_game(std::uint64_t seed, PayoffMode mode = PayoffMode::general,
                                        int depth = 4, int branch = 3) {
    GeneratorConfig cfg;
    cfg.seed = seed;
    cfg.mode = mode;
    cfg.max_depth = depth;
    cfg.max_branch = branch;
    DeterministicRng rng(seed);
    return generate_game(cfg, rng);
}

/// Random game whose Z is forced to equal Y everywhere (leaves untouched:
/// there X = Y = Z already).
inline DynkinGame<Rational> random_game_z_equals_y(std::uint64_t seed) {
    auto g = random_game(seed);
    return DynkinGame<Rational>::make(g.tree, g.x, g.y, g.y);
}

}  // namespace dynkin::testfix
