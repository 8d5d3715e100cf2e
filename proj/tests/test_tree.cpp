#include <doctest.h>

#include <set>

#include "dynkin/tree.hpp"
#include "fixtures.hpp"

using namespace dynkin;
using testfix::random_game;
using testfix::two_leaf_game;

namespace {

/// Independent count: 1 at a leaf, 2 * product over children elsewhere.
template <class S>
std::uint64_t recursive_count(const FiltrationTree<S>& tree, NodeId n) {
    if (tree.is_leaf(n)) return 1;
    std::uint64_t prod = 1;
    for (NodeId c : tree.children[n]) prod *= recursive_count(tree, c);
    return 2 * prod;
}

/// Literal oracle for the expected payoff: enumerate leaves, walk each path.
Rational leaf_enumeration_payoff(const DynkinGame<Rational>& g, const StoppingTime& tau,
                                 const StoppingTime& sigma, NodeId start) {
    Rational sum(0);
    for (NodeId leaf : g.tree.leaves_under(start)) {
        Rational prob(1);
        for (NodeId n = leaf; n != start; n = g.tree.parent[n]) prob *= g.tree.branch_prob[n];
        sum += prob * realized_payoff(g, tau, sigma, leaf, start);
    }
    return sum;
}

}  // namespace

TEST_CASE("validate_tree accepts the degenerate and symmetric cases") {
    FiltrationTree<Rational> single;
    single.horizon = 0;
    single.add_root("n0");
    CHECK(validate_tree(single).ok);

    auto g = two_leaf_game(1, 5, 3);
    CHECK(validate_tree(g.tree).ok);
}

TEST_CASE("validate_tree reports probabilities that do not sum to one") {
    FiltrationTree<double> t;
    t.horizon = 1;
    NodeId root = t.add_root("n0");
    t.add_child(root, "n1", 0.5);
    t.add_child(root, "n2", 0.6);
    auto rep = validate_tree(t);
    CHECK_FALSE(rep.ok);
    REQUIRE(rep.violations.size() == 1);
    CHECK(rep.violations[0].find("n0") != std::string::npos);
    CHECK(rep.violations[0].find("1.1") != std::string::npos);
}

TEST_CASE("validate_tree rejects zero-probability branches and bad shapes") {
    FiltrationTree<Rational> t;
    t.horizon = 2;
    NodeId root = t.add_root("n0");
    t.add_child(root, "n1", Rational(0));
    t.add_child(root, "n2", Rational(1));
    auto rep = validate_tree(t);
    CHECK_FALSE(rep.ok);  // zero branch, and n1/n2 are childless before the horizon
    bool mentions_positive = false;
    for (const auto& v : rep.violations)
        mentions_positive |= v.find("positive") != std::string::npos;
    CHECK(mentions_positive);

    CHECK_THROWS_AS(t.add_child(root, "n1", Rational(1, 2)), std::invalid_argument);
}

TEST_CASE("conditional expectation is the probability-weighted child sum") {
    auto g = two_leaf_game(1, 5, 3);

    AdaptedProcess<Rational> constant(g.tree, Rational(7));
    CHECK(conditional_expectation(g.tree, constant, 0) == Rational(7));

    CHECK(conditional_expectation(g.tree, g.z, 0) == Rational(2));

    FiltrationTree<Rational> t;
    t.horizon = 1;
    NodeId root = t.add_root("n0");
    t.add_child(root, "a", Rational(1, 2));
    t.add_child(root, "b", Rational(1, 4));
    t.add_child(root, "c", Rational(1, 4));
    AdaptedProcess<Rational> p(t, Rational(0));
    p[1] = Rational(1);
    p[2] = Rational(2);
    p[3] = Rational(3);
    CHECK(conditional_expectation(t, p, 0) == Rational(7, 4));

    CHECK_THROWS_WITH_AS(conditional_expectation(t, p, 1), "no successors",
                         std::invalid_argument);
}

TEST_CASE("conditional expectation is linear at every internal node") {
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        auto g = random_game(seed);
        for (NodeId n = 0; n < g.tree.size(); ++n) {
            if (g.tree.is_leaf(n)) continue;
            AdaptedProcess<Rational> combo(g.tree, Rational(0));
            Rational a(3, 2), b(-2, 5);
            for (NodeId m = 0; m < g.tree.size(); ++m) combo[m] = a * g.x[m] + b * g.y[m];
            CHECK(conditional_expectation(g.tree, combo, n) ==
                  a * conditional_expectation(g.tree, g.x, n) +
                      b * conditional_expectation(g.tree, g.y, n));
        }
    }
}

TEST_CASE("realized payoff picks exactly one of X, Y, Z at the first stop") {
    auto g = two_leaf_game(1, 5, 3);
    auto everywhere = StoppingTime::everywhere(g.tree);
    auto leaves_only = StoppingTime::at_leaves_only(g.tree);

    CHECK(realized_payoff(g, everywhere, everywhere, 1) == Rational(3));  // Z at root
    CHECK(realized_payoff(g, everywhere, leaves_only, 1) == Rational(1));  // X at root
    CHECK(realized_payoff(g, leaves_only, leaves_only, 1) == Rational(0));
    CHECK(realized_payoff(g, leaves_only, leaves_only, 2) == Rational(4));
}

TEST_CASE("realized payoff always equals X, Y or Z at the realization node") {
    auto g = random_game(99);
    for_each_stopping_time<Rational>(g.tree, 0, [&](std::uint64_t, const StoppingTime& tau) {
        auto sigma = StoppingTime::at_leaves_only(g.tree);
        for (NodeId leaf : g.tree.leaves_under(0)) {
            Rational r = realized_payoff(g, tau, sigma, leaf);
            NodeId tn = tau.realized_at(g.tree, 0, leaf);
            NodeId sn = sigma.realized_at(g.tree, 0, leaf);
            NodeId at = g.tree.time[tn] <= g.tree.time[sn] ? tn : sn;
            CHECK((r == g.x[at] || r == g.y[at] || r == g.z[at]));
        }
    });
}

TEST_CASE("expected payoff matches the leaf-enumeration oracle") {
    auto g = two_leaf_game(5, 4, 0);
    auto everywhere = StoppingTime::everywhere(g.tree);
    auto leaves_only = StoppingTime::at_leaves_only(g.tree);

    CHECK(expected_payoff(g, everywhere, everywhere, 0) == Rational(0));  // Z at root
    CHECK(expected_payoff(g, everywhere, leaves_only, 0) == Rational(5));
    CHECK(expected_payoff(g, leaves_only, leaves_only, 0) == Rational(2));

    auto ga = two_leaf_game(1, 5, 3);
    CHECK(expected_payoff(ga, leaves_only, leaves_only, 0) == Rational(2));

    for (std::uint64_t seed : {21u, 22u, 23u, 24u}) {
        auto rg = random_game(seed);
        for_each_stopping_time<Rational>(
            rg.tree, 0, [&](std::uint64_t mask, const StoppingTime& tau) {
                auto sigma = stopping_time_from_mask(rg.tree, 0, mask / 2);
                for (NodeId start = 0; start < rg.tree.size(); ++start)
                    CHECK(expected_payoff(rg, tau, sigma, start) ==
                          leaf_enumeration_payoff(rg, tau, sigma, start));
            });
    }
}

TEST_CASE("tower property when both players continue") {
    for (std::uint64_t seed : {31u, 32u}) {
        auto g = random_game(seed);
        auto tau = StoppingTime::at_leaves_only(g.tree);
        auto sigma = StoppingTime::at_leaves_only(g.tree);
        for (NodeId n = 0; n < g.tree.size(); ++n) {
            if (g.tree.is_leaf(n)) continue;
            Rational sum(0);
            for (NodeId c : g.tree.children[n])
                sum += g.tree.branch_prob[c] * expected_payoff(g, tau, sigma, c);
            CHECK(expected_payoff(g, tau, sigma, n) == sum);
        }
    }
}

TEST_CASE("stopping-time enumeration counts and distinctness") {
    FiltrationTree<Rational> single;
    single.horizon = 0;
    single.add_root("n0");
    CHECK(count_stopping_times(single, 0) == 1);

    auto g = two_leaf_game(1, 5, 3);
    CHECK(count_stopping_times(g.tree, 0) == 2);

    // depth-2 binary: root, 2 mid, 4 leaves -> 3 internal nodes -> 8 maps
    FiltrationTree<Rational> t;
    t.horizon = 2;
    NodeId root = t.add_root("r");
    for (int i = 0; i < 2; ++i) {
        NodeId mid = t.add_child(root, "m" + std::to_string(i), Rational(1, 2));
        for (int j = 0; j < 2; ++j)
            t.add_child(mid, "l" + std::to_string(i) + std::to_string(j), Rational(1, 2));
    }
    CHECK(count_stopping_times(t, 0) == 8);
    CHECK(count_stopping_times(t, 0) == recursive_count(t, 0));

    std::set<std::vector<std::uint8_t>> seen;
    for_each_stopping_time<Rational>(t, 0, [&](std::uint64_t, const StoppingTime& st) {
        for (NodeId leaf : t.leaves_under(0)) CHECK(st.stops_at(leaf));
        seen.insert(st.stop);
    });
    CHECK(seen.size() == 8);

    for (std::uint64_t seed : {41u, 42u, 43u}) {
        auto rg = random_game(seed);
        CHECK(count_stopping_times(rg.tree, 0) == recursive_count(rg.tree, 0));
    }
}

TEST_CASE("enumeration cap is enforced with the computed count") {
    FiltrationTree<Rational> t;
    t.horizon = 2;
    NodeId root = t.add_root("r");
    for (int i = 0; i < 3; ++i) {
        NodeId mid = t.add_child(root, "m" + std::to_string(i), Rational(1, 3));
        for (int j = 0; j < 2; ++j)
            t.add_child(mid, "l" + std::to_string(i) + std::to_string(j), Rational(1, 2));
    }
    // 4 internal nodes -> 16 maps; cap 8 must refuse
    CHECK_THROWS_AS(count_stopping_times(t, 0, 8), CapExceeded);
    try {
        count_stopping_times(t, 0, 8);
    } catch (const CapExceeded& e) {
        CHECK(std::string(e.what()).find("2^4") != std::string::npos);
        CHECK(std::string(e.what()).find("8") != std::string::npos);
    }
}
