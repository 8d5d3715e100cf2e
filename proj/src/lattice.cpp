#include "dynkin/lattice.hpp"

#include <charconv>
#include <chrono>

#include <json.hpp>

#include "dynkin/gamefile.hpp"

namespace dynkin {

using ordered_json = nlohmann::ordered_json;

DynkinGame<double> build_lattice(const LatticeSpec& spec) {
    spec.check();
    if (spec.steps > 20)
        throw BudgetExceeded("expanded tree view is limited to 20 steps (2^(N+1)-1 nodes); "
                             "use the recombined solver for larger N");
    FiltrationTree<double> tree;
    tree.tolerance = spec.tolerance;
    tree.horizon = spec.steps;
    tree.add_root("n0");
    std::vector<std::pair<NodeId, int>> level{{tree.root(), 0}};  // node, #ups
    int counter = 1;
    double p = spec.prob_up();
    for (int t = 1; t <= spec.steps; ++t) {
        std::vector<std::pair<NodeId, int>> next;
        for (auto [node, ups] : level) {
            NodeId d = tree.add_child(node, "n" + std::to_string(counter++), 1 - p);
            NodeId u = tree.add_child(node, "n" + std::to_string(counter++), p);
            next.emplace_back(d, ups);
            next.emplace_back(u, ups + 1);
        }
        level = std::move(next);
    }
    AdaptedProcess<double> x(tree, 0.0), y(tree, 0.0), z(tree, 0.0);
    // Recover (t, ups) per node by walking the construction order again.
    std::vector<int> ups_of(tree.size(), 0);
    for (NodeId n = 1; n < tree.size(); ++n) {
        NodeId parent = tree.parent[n];
        bool is_up = tree.children[parent][1] == n;
        ups_of[n] = ups_of[parent] + (is_up ? 1 : 0);
    }
    for (NodeId n = 0; n < tree.size(); ++n)
        spec.payoffs_at(tree.time[n], ups_of[n], x[n], y[n], z[n]);
    return DynkinGame<double>::make(std::move(tree), std::move(x), std::move(y), std::move(z));
}

namespace {

PayoffForm parse_form(const ordered_json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("form"))
        throw ParseError(where + ": payoff must be an object with a 'form' field");
    PayoffForm f;
    std::string form = j["form"].get<std::string>();
    if (form == "affine") {
        f.kind = PayoffForm::Kind::affine;
        f.slope = j.value("slope", 1.0);
        f.intercept = j.value("intercept", 0.0);
    } else if (form == "call") {
        f.kind = PayoffForm::Kind::call;
        f.strike = j.value("strike", 0.0);
    } else if (form == "put") {
        f.kind = PayoffForm::Kind::put;
        f.strike = j.value("strike", 0.0);
    } else if (form == "constant") {
        f.kind = PayoffForm::Kind::constant;
        f.value = j.value("value", 0.0);
    } else {
        throw ParseError(where + ": unknown payoff form '" + form + "'");
    }
    f.shift = j.value("shift", 0.0);
    return f;
}

}  // namespace

LatticeSpec parse_lattice_spec(const std::string& json_text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("lattice spec must be a JSON object");
    if (doc.contains("format_version") && doc["format_version"].get<int>() != kFormatVersion)
        throw ParseError("unsupported format_version");
    LatticeSpec spec;
    if (!doc.contains("model") || !doc["model"].is_object())
        throw ParseError("missing 'model' object");
    const auto& m = doc["model"];
    std::string kind = m.value("kind", std::string("random_walk"));
    if (kind == "random_walk") {
        spec.model = LatticeSpec::Model::random_walk;
    } else if (kind == "market") {
        spec.model = LatticeSpec::Model::market;
        spec.up = m.value("up", 2.0);
        spec.down = m.value("down", 0.5);
        spec.p_up = m.value("prob_up", 0.5);
    } else {
        throw ParseError("unknown model kind '" + kind + "'");
    }
    spec.horizon_time = m.value("horizon_time", 1.0);
    spec.steps = m.value("steps", 1);
    spec.s0 = m.value("s0", spec.model == LatticeSpec::Model::market ? 1.0 : 0.0);
    if (doc.contains("tolerance")) spec.tolerance = doc["tolerance"].get<double>();
    if (doc.contains("node_budget")) spec.node_budget = doc["node_budget"].get<std::uint64_t>();
    if (!doc.contains("payoffs") || !doc["payoffs"].is_object())
        throw ParseError("missing 'payoffs' object");
    const auto& p = doc["payoffs"];
    if (!p.contains("x") || !p.contains("y") || !p.contains("z"))
        throw ParseError("'payoffs' needs 'x', 'y' and 'z'");
    spec.x = parse_form(p["x"], "payoffs.x");
    spec.y = parse_form(p["y"], "payoffs.y");
    const auto& zj = p["z"];
    if (zj.is_object() && zj.contains("form")) {
        std::string form = zj["form"].get<std::string>();
        if (form == "x_minus_delta") {
            spec.z.kind = SimultaneousForm::Kind::x_minus_delta;
            spec.z.delta = zj.value("delta", 0.0);
        } else if (form == "y_plus_delta") {
            spec.z.kind = SimultaneousForm::Kind::y_plus_delta;
            spec.z.delta = zj.value("delta", 0.0);
        } else {
            spec.z.kind = SimultaneousForm::Kind::explicit_form;
            spec.z.form = parse_form(zj, "payoffs.z");
        }
    } else {
        throw ParseError("payoffs.z: payoff must be an object with a 'form' field");
    }
    spec.check();
    return spec;
}

std::vector<StudyRow> convergence_study(const LatticeSpec& spec,
                                        const std::vector<double>& epsilons,
                                        const std::vector<int>& steps) {
    std::vector<StudyRow> rows;
    for (int n : steps) {
        LatticeSpec cell = spec;
        cell.steps = n;
        auto t0 = std::chrono::steady_clock::now();
        RecombinedGame g = RecombinedGame::build(cell);
        RecombinedValue val = solve_recombined(g);
        bool cond = condition_holds_recombined(g, val);
        for (double eps : epsilons) {
            if (!(eps > 0)) throw std::invalid_argument("epsilon must be positive");
            StudyRow row;
            row.steps = n;
            row.epsilon = eps;
            row.value_root = val.v[0][0];
            row.condition_ok = cond;
            auto pair = epsilon_rules(g, val, eps);
            row.gap_max = br_max_recombined(g, pair.sigma) - val.v[0][0];
            row.gap_min = val.v[0][0] - br_min_recombined(g, pair.tau);
            row.e_tau = expected_stop_time(g, pair.tau);
            row.e_sigma = expected_stop_time(g, pair.sigma);
            row.runtime_ms = std::chrono::duration<double, std::milli>(
                                 std::chrono::steady_clock::now() - t0)
                                 .count();
            rows.push_back(row);
        }
    }
    return rows;
}

namespace {

std::string fmt(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v,
                                   std::chars_format::general, 12);
    return std::string(buf, ptr);
}

}  // namespace

std::string study_csv(const std::vector<StudyRow>& rows) {
    std::string out = "N,epsilon,value_root,gap_max,gap_min,E_tau,E_sigma,runtime_ms\n";
    for (const auto& r : rows) {
        out += std::to_string(r.steps) + "," + fmt(r.epsilon) + "," + fmt(r.value_root) + "," +
               fmt(r.gap_max) + "," + fmt(r.gap_min) + "," + fmt(r.e_tau) + "," +
               fmt(r.e_sigma) + "," + fmt(r.runtime_ms) + "\n";
    }
    return out;
}

std::string lattice_report(const LatticeSpec& spec, const std::vector<double>& epsilons,
                           const std::vector<int>& steps, const std::vector<StudyRow>& rows) {
    ordered_json doc;
    doc["format_version"] = kFormatVersion;
    doc["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
    doc["command"] = "lattice";
    doc["model"] = spec.model == LatticeSpec::Model::random_walk ? "random_walk" : "market";
    doc["horizon_time"] = spec.horizon_time;
    doc["epsilons"] = epsilons;
    doc["steps"] = steps;
    auto cells = ordered_json::array();
    for (const auto& r : rows) {
        ordered_json c;
        c["N"] = r.steps;
        c["epsilon"] = r.epsilon;
        c["value_root"] = r.value_root;
        c["condition_holds"] = r.condition_ok;
        c["certified"] = r.condition_ok && r.gap_max <= r.epsilon + 1e-9 &&
                         r.gap_min <= r.epsilon + 1e-9;
        c["gap_max"] = r.gap_max;
        c["gap_min"] = r.gap_min;
        c["expected_tau_time"] = r.e_tau;
        c["expected_sigma_time"] = r.e_sigma;
        cells.push_back(std::move(c));
    }
    doc["cells"] = std::move(cells);
    // terminal payoff layers, small grids only
    ordered_json grids = ordered_json::object();
    for (int n : steps) {
        if (n > 32) continue;
        LatticeSpec cell = spec;
        cell.steps = n;
        auto g = RecombinedGame::build(cell);
        grids[std::to_string(n)] = {{"terminal_z", g.z[n]}};
    }
    if (!grids.empty()) doc["grids"] = std::move(grids);
    return doc.dump(2) + "\n";
}

}  // namespace dynkin
