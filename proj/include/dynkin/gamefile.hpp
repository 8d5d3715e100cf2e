#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "dynkin/oracle.hpp"

namespace dynkin {

inline constexpr const char* kToolName = "dynkin";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kFormatVersion = 1;

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ArithMode { rational, floating };

inline const char* to_string(ArithMode m) {
    return m == ArithMode::rational ? "rational" : "float";
}

/// A parsed game file: exactly one of the two instantiations is populated,
/// per the file's arithmetic mode. Numbers are never coerced between modes.
struct LoadedGame {
    ArithMode mode = ArithMode::rational;
    std::optional<DynkinGame<Rational>> rational_game;
    std::optional<DynkinGame<double>> float_game;
    std::vector<std::string> start_names;
    std::optional<std::uint64_t> seed;

    template <class Fn>
    decltype(auto) visit(Fn&& fn) const {
        return mode == ArithMode::rational ? fn(*rational_game) : fn(*float_game);
    }
};

LoadedGame parse_game_file(const std::string& json_text);

std::string serialize_game(const DynkinGame<Rational>& g,
                           const std::vector<std::string>& start_names = {},
                           std::optional<std::uint64_t> seed = {});
std::string serialize_game(const DynkinGame<double>& g,
                           const std::vector<std::string>& start_names = {},
                           std::optional<std::uint64_t> seed = {});

/// Value process + hitting strategies + equilibrium-condition report.
/// A seed is echoed when the game file carried one.
template <class S>
std::string solve_report(const DynkinGame<S>& g, std::optional<std::uint64_t> seed = {});

/// solve_report plus minimax/equilibrium certificates for the given start
/// nodes and the all-nodes existence equivalence check.
template <class S>
std::string oracle_report(const DynkinGame<S>& g, const std::vector<NodeId>& starts,
                          std::uint64_t cap, const char* command = "oracle",
                          std::optional<std::uint64_t> seed = {});

/// Writes via a temp file in the same directory plus rename.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace dynkin
