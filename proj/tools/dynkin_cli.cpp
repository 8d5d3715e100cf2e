#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dynkin/gamefile.hpp"
#include "dynkin/generator.hpp"
#include "dynkin/lattice.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitBudget = 2;
constexpr int kExitConditionViolated = 3;

void emit(const std::string& content, const std::string& out_path) {
    if (out_path.empty())
        std::cout << content;
    else
        dynkin::write_file_atomic(out_path, content);
}

struct CommonOpts {
    std::string game_path;
    std::string out_path;
    std::string mode_override;  // "", "rational", "float"
    double tolerance = -1;      // <0: keep file value
};

dynkin::LoadedGame load(const CommonOpts& opts) {
    auto loaded = dynkin::parse_game_file(dynkin::read_file(opts.game_path));
    if (opts.mode_override == "float" && loaded.mode == dynkin::ArithMode::rational) {
        dynkin::LoadedGame conv;
        conv.mode = dynkin::ArithMode::floating;
        conv.float_game = dynkin::to_float_game(*loaded.rational_game);
        conv.start_names = loaded.start_names;
        conv.seed = loaded.seed;
        loaded = std::move(conv);
    } else if (opts.mode_override == "rational" && loaded.mode == dynkin::ArithMode::floating) {
        throw dynkin::ParseError("float files cannot be promoted to rational mode; "
                                 "author the file with exact \"p/q\" values instead");
    }
    if (opts.tolerance >= 0) {
        if (loaded.rational_game) loaded.rational_game->tree.tolerance = opts.tolerance;
        if (loaded.float_game) loaded.float_game->tree.tolerance = opts.tolerance;
    }
    return loaded;
}

template <class S>
std::vector<dynkin::NodeId> resolve_starts(const dynkin::DynkinGame<S>& g,
                                           const std::vector<std::string>& cli_starts,
                                           const std::vector<std::string>& file_starts) {
    const auto& names = cli_starts.empty() ? file_starts : cli_starts;
    std::vector<dynkin::NodeId> out;
    for (const auto& name : names) {
        dynkin::NodeId n = g.tree.find(name);
        if (n == dynkin::kNoNode)
            throw dynkin::ParseError("start node '" + name + "' does not exist");
        out.push_back(n);
    }
    if (out.empty()) out.push_back(g.tree.root());
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Solver, oracle and lattice harness for zero-sum stopping games on "
                 "finite filtration trees"};
    app.set_version_flag("--version", std::string(dynkin::kToolName) + " " +
                                          dynkin::kToolVersion);
    app.require_subcommand(1);

    CommonOpts opts;
    std::vector<std::string> starts;
    std::uint64_t cap = dynkin::kDefaultEnumerationCap;

    auto add_common = [&](CLI::App* cmd, bool with_game = true) {
        if (with_game)
            cmd->add_option("game", opts.game_path, "game file (JSON)")->required();
        cmd->add_option("--out", opts.out_path, "write the report to this file (atomic)");
        cmd->add_option("--mode", opts.mode_override, "arithmetic mode override")
            ->check(CLI::IsMember({"rational", "float"}));
        cmd->add_option("--tolerance", opts.tolerance, "float-mode comparison tolerance");
    };

    auto* solve = app.add_subcommand("solve", "value process, hitting strategies and the "
                                              "equilibrium-condition report");
    add_common(solve);

    auto* oracle = app.add_subcommand("oracle", "brute-force minimax and Nash certificates");
    add_common(oracle);
    oracle->add_option("--start", starts, "start node(s); default: file start_nodes, else root");
    oracle->add_option("--cap", cap, "stopping-time enumeration cap");

    auto* report = app.add_subcommand("report", "combined solve + oracle report");
    add_common(report);
    report->add_option("--start", starts, "start node(s); default: file start_nodes, else root");
    report->add_option("--cap", cap, "stopping-time enumeration cap");

    std::string spec_path, csv_path, format = "json";
    std::vector<double> epsilons;
    std::vector<int> step_list;
    bool study = false;
    auto* lattice = app.add_subcommand("lattice", "time-grid games: epsilon strategies, "
                                                  "certificates and convergence tables");
    lattice->add_option("spec", spec_path, "lattice spec file (JSON)")->required();
    lattice->add_option("--epsilon", epsilons, "epsilon values (> 0)");
    lattice->add_option("--steps", step_list, "grid sizes N");
    lattice->add_flag("--study", study, "run the full (epsilon, N) product");
    lattice->add_option("--out", opts.out_path, "write the JSON report to this file");
    lattice->add_option("--csv", csv_path, "write the study table to this file");
    lattice->add_option("--format", format, "stdout format")
        ->check(CLI::IsMember({"json", "csv"}));

    std::uint64_t seed = 1;
    int depth = 4, branch = 3, count = 1;
    std::string payoff_mode = "general", out_dir = ".", arith = "rational";
    auto* generate = app.add_subcommand("generate", "emit reproducible random game files");
    generate->add_option("--seed", seed, "generator seed");
    generate->add_option("--depth", depth, "maximum tree depth")->check(CLI::Range(1, 16));
    generate->add_option("--branch", branch, "maximum branching")->check(CLI::Range(1, 8));
    generate->add_option("--count", count, "number of game files")->check(CLI::PositiveNumber);
    generate->add_option("--mode", payoff_mode, "payoff mode")
        ->check(CLI::IsMember({"standard", "general", "z-between"}));
    generate->add_option("--arith", arith, "arithmetic mode of emitted files")
        ->check(CLI::IsMember({"rational", "float"}));
    generate->add_option("--out-dir", out_dir, "directory for the emitted files");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) {
            auto loaded = load(opts);
            int exit_code = kExitOk;
            std::string text = loaded.visit([&](const auto& g) {
                auto vp = dynkin::compute_value(g);
                if (!dynkin::check_equilibrium_condition(g, vp).holds_everywhere)
                    exit_code = kExitConditionViolated;
                return dynkin::solve_report(g, loaded.seed);
            });
            emit(text, opts.out_path);
            return exit_code;
        }
        if (oracle->parsed() || report->parsed()) {
            auto loaded = load(opts);
            std::string text = loaded.visit([&](const auto& g) {
                auto ids = resolve_starts(g, starts, loaded.start_names);
                return dynkin::oracle_report(g, ids, cap,
                                             oracle->parsed() ? "oracle" : "report",
                                             loaded.seed);
            });
            emit(text, opts.out_path);
            return kExitOk;
        }
        if (lattice->parsed()) {
            auto spec = dynkin::parse_lattice_spec(dynkin::read_file(spec_path));
            if (epsilons.empty()) epsilons = {0.1};
            if (step_list.empty()) step_list = {spec.steps};
            for (double e : epsilons)
                if (!(e > 0)) throw dynkin::ParseError("epsilon must be positive");
            if (!study) {
                epsilons.resize(1);
                step_list.resize(1);
            }
            auto rows = dynkin::convergence_study(spec, epsilons, step_list);
            std::string json_text = dynkin::lattice_report(spec, epsilons, step_list, rows);
            std::string csv_text = dynkin::study_csv(rows);
            if (!opts.out_path.empty()) dynkin::write_file_atomic(opts.out_path, json_text);
            if (!csv_path.empty()) dynkin::write_file_atomic(csv_path, csv_text);
            if (format == "csv")
                std::cout << csv_text;
            else if (opts.out_path.empty())
                std::cout << json_text;
            return kExitOk;
        }
        if (generate->parsed()) {
            dynkin::GeneratorConfig cfg;
            cfg.seed = seed;
            cfg.max_depth = depth;
            cfg.max_branch = branch;
            cfg.mode = dynkin::payoff_mode_from_string(payoff_mode);
            dynkin::DeterministicRng rng(cfg.seed);
            for (int i = 0; i < count; ++i) {
                auto game = dynkin::generate_game(cfg, rng);
                std::string text =
                    arith == "rational"
                        ? dynkin::serialize_game(game, {}, cfg.seed)
                        : dynkin::serialize_game(dynkin::to_float_game(game), {}, cfg.seed);
                std::string path = out_dir + "/game_" + std::to_string(seed) + "_" +
                                   std::to_string(i) + ".json";
                dynkin::write_file_atomic(path, text);
                std::cout << path << "\n";
            }
            return kExitOk;
        }
    } catch (const dynkin::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const dynkin::CapExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBudget;
    } catch (const dynkin::BudgetExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBudget;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitBudget;
    }
    return kExitOk;
}
