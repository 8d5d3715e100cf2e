#include <doctest.h>

#include <json.hpp>

#include "dynkin/gamefile.hpp"
#include "dynkin/generator.hpp"
#include "fixtures.hpp"

using namespace dynkin;
using nlohmann::json;
using testfix::two_leaf_game;

namespace {

const char* kFixtureA = R"({
  "format_version": 1,
  "mode": "rational",
  "horizon": 1,
  "nodes": [
    {"id": "n0", "time": 0, "x": 1, "y": 5, "z": 3},
    {"id": "n1", "time": 1, "parent": "n0", "probability": "1/2", "x": 0, "y": 0, "z": 0},
    {"id": "n2", "time": 1, "parent": "n0", "probability": "1/2", "x": 4, "y": 4, "z": 4}
  ]
})";

}  // namespace

TEST_CASE("parsing a rational game file") {
    auto loaded = parse_game_file(kFixtureA);
    REQUIRE(loaded.mode == ArithMode::rational);
    const auto& g = *loaded.rational_game;
    CHECK(g.tree.horizon == 1);
    CHECK(g.tree.size() == 3);
    CHECK(g.x[0] == Rational(1));
    CHECK(g.tree.branch_prob[1] == Rational(1, 2));
    CHECK(g.standard);
}

TEST_CASE("parse errors carry the offending node and field") {
    auto expect_error = [](const std::string& text, const std::string& needle) {
        try {
            parse_game_file(text);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            INFO(e.what());
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };

    expect_error("{", "not valid JSON");
    expect_error(R"({"mode": "octal", "horizon": 0, "nodes": []})", "unknown mode");

    json doc = json::parse(kFixtureA);
    doc["nodes"][1]["probability"] = "0.5,0.6";
    expect_error(doc.dump(), "n1");

    doc = json::parse(kFixtureA);
    doc["nodes"][1]["probability"] = 0.5;
    expect_error(doc.dump(), "rational mode does not accept decimals");

    doc = json::parse(kFixtureA);
    doc["mode"] = "float";
    doc["nodes"][0]["x"] = "1/2";
    expect_error(doc.dump(), "float mode does not accept rational strings");

    doc = json::parse(kFixtureA);
    doc["nodes"][2]["probability"] = "3/5";  // sums to 11/10
    expect_error(doc.dump(), "11/10");

    doc = json::parse(kFixtureA);
    doc["nodes"][1].erase("x");
    expect_error(doc.dump(), "missing field 'x'");

    doc = json::parse(kFixtureA);
    doc["start_nodes"] = {"nope"};
    expect_error(doc.dump(), "start node 'nope'");
}

TEST_CASE("start nodes and seed are carried through") {
    json doc = json::parse(kFixtureA);
    doc["start_nodes"] = {"n0", "n2"};
    doc["seed"] = 42;
    auto loaded = parse_game_file(doc.dump());
    CHECK(loaded.start_names == std::vector<std::string>{"n0", "n2"});
    REQUIRE(loaded.seed.has_value());
    CHECK(*loaded.seed == 42);
}

TEST_CASE("serialize-parse round trip is the identity on games") {
    auto check_round_trip = [](const DynkinGame<Rational>& g) {
        std::string text = serialize_game(g);
        auto loaded = parse_game_file(text);
        REQUIRE(loaded.mode == ArithMode::rational);
        const auto& h = *loaded.rational_game;
        REQUIRE(h.tree.size() == g.tree.size());
        CHECK(h.tree.horizon == g.tree.horizon);
        for (NodeId n = 0; n < g.tree.size(); ++n) {
            CHECK(h.tree.name[n] == g.tree.name[n]);
            CHECK(h.tree.parent[n] == g.tree.parent[n]);
            CHECK(h.tree.branch_prob[n] == g.tree.branch_prob[n]);
            CHECK(h.x[n] == g.x[n]);
            CHECK(h.y[n] == g.y[n]);
            CHECK(h.z[n] == g.z[n]);
        }
        CHECK(serialize_game(h) == text);  // serialization is stable, too
    };

    check_round_trip(two_leaf_game(1, 5, 3));
    check_round_trip(two_leaf_game(5, 4, 0));
    for (std::uint64_t seed = 1100; seed < 1130; ++seed)
        check_round_trip(testfix::random_game(seed));
}

TEST_CASE("float game files round trip") {
    auto g = to_float_game(two_leaf_game(1, 5, 3));
    std::string text = serialize_game(g);
    auto loaded = parse_game_file(text);
    REQUIRE(loaded.mode == ArithMode::floating);
    CHECK(loaded.float_game->x[0] == 1.0);
    CHECK(serialize_game(*loaded.float_game) == text);
}

TEST_CASE("generator is deterministic and respects its modes") {
    GeneratorConfig cfg;
    cfg.seed = 77;
    cfg.mode = PayoffMode::standard;
    DeterministicRng rng1(cfg.seed), rng2(cfg.seed);
    for (int i = 0; i < 5; ++i) {
        auto g1 = generate_game(cfg, rng1);
        auto g2 = generate_game(cfg, rng2);
        CHECK(serialize_game(g1) == serialize_game(g2));
        CHECK(g1.standard);
        CHECK(validate_tree(g1.tree).ok);
        CHECK(count_stopping_times(g1.tree, 0) <= 1u << 15);
    }
}

TEST_CASE("solve report shape and determinism") {
    auto g = two_leaf_game(1, 5, 3);
    std::string r1 = solve_report(g);
    std::string r2 = solve_report(g);
    CHECK(r1 == r2);

    auto doc = json::parse(r1);
    CHECK(doc["format_version"] == 1);
    CHECK(doc["mode"] == "rational");
    CHECK(doc["standard"] == true);
    CHECK(doc["equilibrium_condition"]["holds_everywhere"] == true);
    REQUIRE(doc["nodes"].size() == 3);
    CHECK(doc["nodes"][0]["v"] == 2);
    CHECK(doc["nodes"][0]["l"] == 1);
    CHECK(doc["nodes"][0]["u"] == 5);
    CHECK(doc["nodes"][0]["continuation"] == 2);
    CHECK(doc["nodes"][0]["tau_star"] == false);
    CHECK(doc["nodes"][1]["continuation"].is_null());
    CHECK(doc["nodes"][1]["tau_star"] == true);
}

TEST_CASE("oracle report on the no-value fixture") {
    auto g = testfix::no_equilibrium_fixture();
    std::string text = oracle_report(g, {0}, kDefaultEnumerationCap);
    auto doc = json::parse(text);
    const auto& start = doc["oracle"]["starts"][0];
    CHECK(start["node"] == "n0");
    CHECK(start["maximin"] == 2);
    CHECK(start["minimax"] == 4);
    CHECK(start["has_value"] == false);
    CHECK(start["epsilon_star"] == 2);
    CHECK(start["certificate"]["verdict"] == "epsilon_only");
    CHECK(start["certificate"]["witness"]["gain"] > 0);
    CHECK(doc["oracle"]["equivalence"]["agree"] == true);
    CHECK(doc["equilibrium_condition"]["holds_everywhere"] == false);
    CHECK(doc["equilibrium_condition"]["violations"][0]["gap"] == 2);

    auto a = two_leaf_game(1, 5, 3);
    auto da = json::parse(oracle_report(a, {0}, kDefaultEnumerationCap));
    const auto& sa = da["oracle"]["starts"][0];
    CHECK(sa["has_value"] == true);
    CHECK(sa["certificate"]["verdict"] == "nash_exists");
    CHECK(sa["equilibria_count"].get<int>() >= 1);
}

TEST_CASE("rational values serialize canonically in reports") {
    // probabilities 1/4, 3/4 with payoffs making V0 fractional
    FiltrationTree<Rational> t;
    t.horizon = 1;
    NodeId root = t.add_root("n0");
    t.add_child(root, "n1", Rational(1, 4));
    t.add_child(root, "n2", Rational(3, 4));
    AdaptedProcess<Rational> x(t, Rational(0)), y(t, Rational(0)), z(t, Rational(0));
    x[0] = Rational(-9);
    y[0] = Rational(9);
    z[0] = Rational(0);
    z[1] = Rational(1);
    z[2] = Rational(2);
    auto g = DynkinGame<Rational>::make(std::move(t), x, y, z);
    auto doc = json::parse(solve_report(g));
    CHECK(doc["nodes"][0]["v"] == "7/4");
    CHECK(doc["nodes"][0]["continuation"] == "7/4");
}

TEST_CASE("atomic writes land complete files") {
    std::string path = "io_test_tmp_report.json";
    write_file_atomic(path, "hello\n");
    CHECK(read_file(path) == "hello\n");
    write_file_atomic(path, "world\n");
    CHECK(read_file(path) == "world\n");
    std::remove(path.c_str());
}
