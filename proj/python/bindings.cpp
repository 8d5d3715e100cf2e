#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dynkin/gamefile.hpp"
#include "dynkin/generator.hpp"
#include "dynkin/lattice.hpp"

namespace py = pybind11;
using namespace dynkin;

namespace {

/// Float-mode view of a game file for interactive use; exact rational
/// pipelines should go through the *_report functions, which preserve the
/// file's arithmetic mode.
class FloatGame {
public:
    explicit FloatGame(const std::string& json_text) {
        auto loaded = parse_game_file(json_text);
        game_ = loaded.mode == ArithMode::floating ? std::move(*loaded.float_game)
                                                   : to_float_game(*loaded.rational_game);
        vp_ = compute_value(game_);
    }

    std::vector<std::string> nodes() const { return game_.tree.name; }
    std::vector<int> times() const { return game_.tree.time; }
    bool standard() const { return game_.standard; }

    std::vector<double> value() const { return vp_.v.values; }
    std::vector<double> lower_envelope() const { return vp_.l.values; }
    std::vector<double> upper_envelope() const { return vp_.u.values; }

    std::vector<bool> tau_star() const { return stops(optimal_stopping_times(game_, vp_).first); }
    std::vector<bool> sigma_star() const {
        return stops(optimal_stopping_times(game_, vp_).second);
    }

    bool condition_holds() const {
        return check_equilibrium_condition(game_, vp_).holds_everywhere;
    }

    py::dict minimax(const std::string& start, std::uint64_t cap) const {
        auto mm = brute_force_minimax(game_, vp_, find_node(start), cap);
        py::dict out;
        out["maximin"] = mm.maximin;
        out["minimax"] = mm.minimax;
        out["value"] = mm.value_candidate;
        out["has_value"] = mm.has_value;
        out["epsilon_star"] = mm.epsilon_star;
        return out;
    }

    py::dict find_nash(const std::string& start, std::uint64_t cap) const {
        auto cert = dynkin::find_nash(game_, vp_, find_node(start), cap);
        py::dict out;
        out["verdict"] = std::string(to_string(cert.verdict));
        if (cert.epsilon_star) out["epsilon_star"] = *cert.epsilon_star;
        if (cert.strategies) {
            out["tau_stops"] = stops(cert.strategies->first);
            out["sigma_stops"] = stops(cert.strategies->second);
        }
        return out;
    }

    py::dict epsilon_certificate(double epsilon, const std::string& start) const {
        auto pair = epsilon_strategies(game_, vp_, epsilon);
        auto cert = verify_epsilon_optimality(game_, vp_, pair, find_node(start));
        py::dict out;
        out["applicable"] = cert.applicable;
        out["certified"] = cert.certified;
        if (cert.applicable) {
            out["gap_max"] = cert.gap_max;
            out["gap_min"] = cert.gap_min;
        }
        return out;
    }

private:
    DynkinGame<double> game_;
    ValueProcess<double> vp_;

    NodeId find_node(const std::string& name) const {
        if (name.empty()) return game_.tree.root();
        NodeId n = game_.tree.find(name);
        if (n == kNoNode) throw std::invalid_argument("unknown node '" + name + "'");
        return n;
    }

    std::vector<bool> stops(const StoppingTime& st) const {
        return std::vector<bool>(st.stop.begin(), st.stop.end());
    }
};

std::string solve_report_str(const std::string& json_text) {
    return parse_game_file(json_text).visit([](const auto& g) { return solve_report(g); });
}

std::string oracle_report_str(const std::string& json_text, const std::string& start,
                              std::uint64_t cap) {
    auto loaded = parse_game_file(json_text);
    return loaded.visit([&](const auto& g) {
        std::vector<NodeId> ids;
        if (!start.empty()) {
            NodeId n = g.tree.find(start);
            if (n == kNoNode) throw std::invalid_argument("unknown node '" + start + "'");
            ids.push_back(n);
        } else {
            for (const auto& name : loaded.start_names) ids.push_back(g.tree.find(name));
            if (ids.empty()) ids.push_back(g.tree.root());
        }
        return oracle_report(g, ids, cap);
    });
}

std::pair<std::string, std::string> lattice_report_str(const std::string& spec_json,
                                                       const std::vector<double>& epsilons,
                                                       const std::vector<int>& steps) {
    auto spec = parse_lattice_spec(spec_json);
    auto eps = epsilons.empty() ? std::vector<double>{0.1} : epsilons;
    auto ns = steps.empty() ? std::vector<int>{spec.steps} : steps;
    auto rows = convergence_study(spec, eps, ns);
    return {lattice_report(spec, eps, ns, rows), study_csv(rows)};
}

std::vector<std::string> generate_games_str(std::uint64_t seed, int count, int depth, int branch,
                                            const std::string& mode) {
    GeneratorConfig cfg;
    cfg.seed = seed;
    cfg.max_depth = depth;
    cfg.max_branch = branch;
    cfg.mode = payoff_mode_from_string(mode);
    DeterministicRng rng(seed);
    std::vector<std::string> out;
    for (int i = 0; i < count; ++i) out.push_back(serialize_game(generate_game(cfg, rng), {}, seed));
    return out;
}

}  // namespace

PYBIND11_MODULE(_dynkin, m) {
    m.doc() = "Zero-sum stopping games on finite filtration trees: backward-induction "
              "solver, brute-force oracle and lattice harness";
    m.attr("__version__") = kToolVersion;

    m.def("solve_report", &solve_report_str, py::arg("game_json"),
          "Value process, hitting strategies and the equilibrium-condition report (JSON in/out)");
    m.def("oracle_report", &oracle_report_str, py::arg("game_json"), py::arg("start") = "",
          py::arg("cap") = kDefaultEnumerationCap,
          "Minimax/maximin oracle and Nash certificates (JSON in/out)");
    m.def("lattice_report", &lattice_report_str, py::arg("spec_json"),
          py::arg("epsilons") = std::vector<double>{}, py::arg("steps") = std::vector<int>{},
          "Epsilon-strategy certificates and the convergence table; returns (report_json, csv)");
    m.def("generate_games", &generate_games_str, py::arg("seed"), py::arg("count") = 1,
          py::arg("depth") = 4, py::arg("branch") = 3, py::arg("mode") = "general",
          "Reproducible random game files as JSON strings");

    py::class_<FloatGame>(m, "FloatGame")
        .def(py::init<const std::string&>(), py::arg("game_json"))
        .def_property_readonly("nodes", &FloatGame::nodes)
        .def_property_readonly("times", &FloatGame::times)
        .def_property_readonly("standard", &FloatGame::standard)
        .def("value", &FloatGame::value)
        .def("lower_envelope", &FloatGame::lower_envelope)
        .def("upper_envelope", &FloatGame::upper_envelope)
        .def("tau_star", &FloatGame::tau_star)
        .def("sigma_star", &FloatGame::sigma_star)
        .def("condition_holds", &FloatGame::condition_holds)
        .def("minimax", &FloatGame::minimax, py::arg("start") = "",
             py::arg("cap") = kDefaultEnumerationCap)
        .def("find_nash", &FloatGame::find_nash, py::arg("start") = "",
             py::arg("cap") = kDefaultEnumerationCap)
        .def("epsilon_certificate", &FloatGame::epsilon_certificate, py::arg("epsilon"),
             py::arg("start") = "");
}
