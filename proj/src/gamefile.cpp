#include "dynkin/gamefile.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace dynkin {

using ordered_json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ParseError(msg); }

std::string node_context(const ordered_json& node, size_t idx) {
    if (node.is_object() && node.contains("id") && node["id"].is_string())
        return "node '" + node["id"].get<std::string>() + "'";
    return "nodes[" + std::to_string(idx) + "]";
}

Rational rational_field(const ordered_json& v, const std::string& where) {
    if (v.is_number_integer()) return Rational(v.get<long long>());
    if (v.is_string()) {
        try {
            return Rational::parse(v.get<std::string>());
        } catch (const std::exception& e) {
            fail(where + ": " + e.what());
        }
    }
    if (v.is_number_float())
        fail(where + ": rational mode does not accept decimals; write \"p/q\"");
    fail(where + ": expected an integer or a \"p/q\" string");
}

double float_field(const ordered_json& v, const std::string& where) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string())
        fail(where + ": float mode does not accept rational strings; write a decimal");
    fail(where + ": expected a number");
}

ordered_json rational_json(const Rational& r) {
    if (r.is_integer()) return ordered_json(r.num());
    return ordered_json(r.str());
}

ordered_json scalar_json(const Rational& r) { return rational_json(r); }
ordered_json scalar_json(double d) { return ordered_json(d); }

template <class S>
LoadedGame parse_with_mode(const ordered_json& doc, ArithMode mode) {
    auto field = [&](const ordered_json& v, const std::string& where) -> S {
        if constexpr (std::is_same_v<S, Rational>)
            return rational_field(v, where);
        else
            return float_field(v, where);
    };

    if (!doc.contains("horizon") || !doc["horizon"].is_number_integer())
        fail("missing or non-integer field 'horizon'");
    int horizon = doc["horizon"].get<int>();
    if (!doc.contains("nodes") || !doc["nodes"].is_array()) fail("missing 'nodes' array");

    FiltrationTree<S> tree;
    tree.horizon = horizon;
    if (doc.contains("tolerance")) tree.tolerance = doc["tolerance"].get<double>();

    std::vector<S> xs, ys, zs;
    size_t idx = 0;
    for (const auto& node : doc["nodes"]) {
        std::string ctx = node_context(node, idx);
        if (!node.is_object()) fail(ctx + ": node entries must be objects");
        if (!node.contains("id") || !node["id"].is_string()) fail(ctx + ": missing string 'id'");
        std::string id = node["id"].get<std::string>();
        if (!node.contains("time") || !node["time"].is_number_integer())
            fail(ctx + ": missing integer 'time'");
        int t = node["time"].get<int>();
        try {
            if (!node.contains("parent")) {
                if (t != 0) fail(ctx + ": node without parent must be at time 0");
                tree.add_root(id);
            } else {
                if (!node["parent"].is_string()) fail(ctx + ": 'parent' must be a node id");
                NodeId p = tree.find(node["parent"].get<std::string>());
                if (p == kNoNode)
                    fail(ctx + ": parent '" + node["parent"].get<std::string>() +
                         "' not defined before use");
                if (!node.contains("probability")) fail(ctx + ": missing 'probability'");
                tree.add_child(p, id, field(node["probability"], ctx + " field 'probability'"));
            }
        } catch (const std::invalid_argument& e) {
            fail(ctx + ": " + e.what());
        }
        if (tree.time.back() != t)
            fail(ctx + ": declared time " + std::to_string(t) + " does not match parent time + 1");
        for (const char* key : {"x", "y", "z"})
            if (!node.contains(key)) fail(ctx + ": missing field '" + std::string(key) + "'");
        xs.push_back(field(node["x"], ctx + " field 'x'"));
        ys.push_back(field(node["y"], ctx + " field 'y'"));
        zs.push_back(field(node["z"], ctx + " field 'z'"));
        ++idx;
    }

    auto report = validate_tree(tree);
    if (!report.ok) {
        std::string msg = "invalid tree:";
        for (const auto& v : report.violations) msg += "\n  - " + v;
        fail(msg);
    }

    LoadedGame out;
    out.mode = mode;
    auto game = DynkinGame<S>::make(std::move(tree), AdaptedProcess<S>(std::move(xs)),
                                    AdaptedProcess<S>(std::move(ys)),
                                    AdaptedProcess<S>(std::move(zs)));
    if (doc.contains("start_nodes")) {
        if (!doc["start_nodes"].is_array()) fail("'start_nodes' must be an array of node ids");
        for (const auto& s : doc["start_nodes"]) {
            if (!s.is_string()) fail("'start_nodes' must contain node ids");
            if (game.tree.find(s.get<std::string>()) == kNoNode)
                fail("start node '" + s.get<std::string>() + "' does not exist");
            out.start_names.push_back(s.get<std::string>());
        }
    }
    if (doc.contains("seed")) out.seed = doc["seed"].get<std::uint64_t>();
    if constexpr (std::is_same_v<S, Rational>)
        out.rational_game = std::move(game);
    else
        out.float_game = std::move(game);
    return out;
}

}  // namespace

LoadedGame parse_game_file(const std::string& json_text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(std::string("not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) fail("game file must be a JSON object");
    if (doc.contains("format_version") && doc["format_version"].get<int>() != kFormatVersion)
        fail("unsupported format_version");
    std::string mode = doc.value("mode", std::string("rational"));
    if (mode == "rational") return parse_with_mode<Rational>(doc, ArithMode::rational);
    if (mode == "float") return parse_with_mode<double>(doc, ArithMode::floating);
    fail("unknown mode '" + mode + "' (expected \"rational\" or \"float\")");
}

namespace {

template <class S>
std::string serialize_impl(const DynkinGame<S>& g, ArithMode mode,
                           const std::vector<std::string>& start_names,
                           std::optional<std::uint64_t> seed) {
    ordered_json doc;
    doc["format_version"] = kFormatVersion;
    doc["mode"] = to_string(mode);
    doc["horizon"] = g.tree.horizon;
    if (mode == ArithMode::floating) doc["tolerance"] = g.tree.tolerance;
    auto nodes = ordered_json::array();
    for (NodeId n = 0; n < g.tree.size(); ++n) {
        ordered_json node;
        node["id"] = g.tree.name[n];
        node["time"] = g.tree.time[n];
        if (g.tree.parent[n] != kNoNode) {
            node["parent"] = g.tree.name[g.tree.parent[n]];
            node["probability"] = scalar_json(g.tree.branch_prob[n]);
        }
        node["x"] = scalar_json(g.x[n]);
        node["y"] = scalar_json(g.y[n]);
        node["z"] = scalar_json(g.z[n]);
        nodes.push_back(std::move(node));
    }
    doc["nodes"] = std::move(nodes);
    if (!start_names.empty()) doc["start_nodes"] = start_names;
    if (seed) doc["seed"] = *seed;
    return doc.dump(2) + "\n";
}

}  // namespace

std::string serialize_game(const DynkinGame<Rational>& g,
                           const std::vector<std::string>& start_names,
                           std::optional<std::uint64_t> seed) {
    return serialize_impl(g, ArithMode::rational, start_names, seed);
}

std::string serialize_game(const DynkinGame<double>& g,
                           const std::vector<std::string>& start_names,
                           std::optional<std::uint64_t> seed) {
    return serialize_impl(g, ArithMode::floating, start_names, seed);
}

namespace {

template <class S>
ordered_json stop_set_json(const DynkinGame<S>& g, const StoppingTime& st) {
    auto arr = ordered_json::array();
    for (NodeId n = 0; n < g.tree.size(); ++n)
        if (st.stops_at(n)) arr.push_back(g.tree.name[n]);
    return arr;
}

template <class S>
ordered_json condition_json(const DynkinGame<S>& g, const EquilibriumConditionReport<S>& rep) {
    ordered_json out;
    out["holds_everywhere"] = rep.holds_everywhere;
    auto arr = ordered_json::array();
    for (const auto& v : rep.violations) {
        ordered_json item;
        item["node"] = g.tree.name[v.node];
        item["kind"] =
            v.kind == EquilibriumConditionReport<S>::Kind::below_min ? "below_min" : "above_max";
        item["gap"] = scalar_json(v.gap);
        arr.push_back(std::move(item));
    }
    out["violations"] = std::move(arr);
    return out;
}

template <class S>
ordered_json solve_body(const DynkinGame<S>& g, const ValueProcess<S>& vp, ArithMode mode,
                        const char* command, std::optional<std::uint64_t> seed) {
    ordered_json doc;
    doc["format_version"] = kFormatVersion;
    doc["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
    doc["command"] = command;
    if (seed) doc["seed"] = *seed;
    doc["mode"] = to_string(mode);
    doc["horizon"] = g.tree.horizon;
    doc["standard"] = g.standard;
    auto adjusted = ordered_json::array();
    for (NodeId n : g.terminal_adjusted) adjusted.push_back(g.tree.name[n]);
    doc["terminal_adjusted"] = std::move(adjusted);

    auto [tau_star, sigma_star] = optimal_stopping_times(g, vp);
    auto nodes = ordered_json::array();
    for (NodeId n = 0; n < g.tree.size(); ++n) {
        ordered_json node;
        node["id"] = g.tree.name[n];
        node["time"] = g.tree.time[n];
        node["v"] = scalar_json(vp.v[n]);
        node["l"] = scalar_json(vp.l[n]);
        node["u"] = scalar_json(vp.u[n]);
        node["continuation"] =
            g.tree.is_leaf(n) ? ordered_json(nullptr) : scalar_json(vp.continuation[n]);
        node["tau_star"] = tau_star.stops_at(n);
        node["sigma_star"] = sigma_star.stops_at(n);
        nodes.push_back(std::move(node));
    }
    doc["nodes"] = std::move(nodes);
    doc["equilibrium_condition"] = condition_json(g, check_equilibrium_condition(g, vp));
    return doc;
}

template <class S>
ordered_json certificate_json(const DynkinGame<S>& g, const EquilibriumCertificate<S>& cert) {
    ordered_json out;
    out["verdict"] = to_string(cert.verdict);
    if (cert.epsilon_star) out["epsilon_star"] = scalar_json(*cert.epsilon_star);
    if (cert.strategies) {
        out["strategies"] = {{"tau_stops", stop_set_json(g, cert.strategies->first)},
                             {"sigma_stops", stop_set_json(g, cert.strategies->second)}};
    }
    if (cert.witness) {
        const auto& w = *cert.witness;
        ordered_json wj;
        wj["player"] = w.by_max_player ? "max" : "min";
        wj["baseline"] = scalar_json(w.baseline);
        wj["improved"] = scalar_json(w.improved);
        wj["gain"] = scalar_json(w.by_max_player ? w.improved - w.baseline
                                                 : w.baseline - w.improved);
        wj["deviation_stops"] = stop_set_json(g, w.deviation);
        out["witness"] = std::move(wj);
    }
    return out;
}

}  // namespace

template <class S>
std::string solve_report(const DynkinGame<S>& g, std::optional<std::uint64_t> seed) {
    auto vp = compute_value(g);
    ArithMode mode = std::is_same_v<S, Rational> ? ArithMode::rational : ArithMode::floating;
    return solve_body(g, vp, mode, "solve", seed).dump(2) + "\n";
}

template <class S>
std::string oracle_report(const DynkinGame<S>& g, const std::vector<NodeId>& starts,
                          std::uint64_t cap, const char* command,
                          std::optional<std::uint64_t> seed) {
    auto vp = compute_value(g);
    ArithMode mode = std::is_same_v<S, Rational> ? ArithMode::rational : ArithMode::floating;
    ordered_json doc = solve_body(g, vp, mode, command, seed);

    ordered_json oracle;
    oracle["cap"] = cap;
    auto arr = ordered_json::array();
    for (NodeId start : starts) {
        ordered_json item;
        item["node"] = g.tree.name[start];
        auto mm = brute_force_minimax(g, vp, start, cap);
        item["maximin"] = scalar_json(mm.maximin);
        item["minimax"] = scalar_json(mm.minimax);
        item["value"] = scalar_json(mm.value_candidate);
        item["has_value"] = mm.has_value;
        item["epsilon_star"] = scalar_json(mm.epsilon_star);
        item["tau_achievers"] = mm.tau_count;
        item["sigma_achievers"] = mm.sigma_count;
        if (mm.has_value) {
            item["equilibria_count"] = mm.tau_count * mm.sigma_count;
            auto pairs = ordered_json::array();
            size_t shown = 0;
            for (auto tmask : mm.maximin_taus) {
                for (auto smask : mm.minimax_sigmas) {
                    if (shown++ >= 4) break;
                    pairs.push_back(
                        {{"tau_stops",
                          stop_set_json(g, stopping_time_from_mask(g.tree, start, tmask))},
                         {"sigma_stops",
                          stop_set_json(g, stopping_time_from_mask(g.tree, start, smask))}});
                }
                if (shown >= 4) break;
            }
            item["equilibria"] = std::move(pairs);
        }
        item["certificate"] = certificate_json(g, find_nash(g, vp, start, cap));
        arr.push_back(std::move(item));
    }
    oracle["starts"] = std::move(arr);

    auto eq = check_nash_equivalence(g, vp, cap);
    ordered_json ej;
    ej["condition_everywhere"] = eq.condition_everywhere;
    ej["nash_everywhere"] = eq.nash_everywhere;
    ej["agree"] = eq.agree;
    if (eq.offending_node) ej["offending_node"] = g.tree.name[*eq.offending_node];
    oracle["equivalence"] = std::move(ej);

    doc["oracle"] = std::move(oracle);
    return doc.dump(2) + "\n";
}

template std::string solve_report<Rational>(const DynkinGame<Rational>&,
                                            std::optional<std::uint64_t>);
template std::string solve_report<double>(const DynkinGame<double>&,
                                          std::optional<std::uint64_t>);
template std::string oracle_report<Rational>(const DynkinGame<Rational>&,
                                             const std::vector<NodeId>&, std::uint64_t,
                                             const char*, std::optional<std::uint64_t>);
template std::string oracle_report<double>(const DynkinGame<double>&, const std::vector<NodeId>&,
                                           std::uint64_t, const char*,
                                           std::optional<std::uint64_t>);

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        out << content;
    }
    fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace dynkin
