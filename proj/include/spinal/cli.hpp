#pragma once

// Command-line front end: `spinal <bound|floor|threshold|sweep|roundtrip>`.
//
// Settings come from built-in defaults, then an optional JSON file
// (--config), then individual flags. Exit codes: 0 success, 2 configuration
// error, 3 budget or runtime error.

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace spinal::cli {

enum class Format { csv, json };

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitRuntime = 3 };

/// A rejected setting; `field()` is the offending key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct RunConfig {
    unsigned n = 8;
    unsigned k = 4;
    unsigned v = 32;
    unsigned c = 4;
    unsigned L = 1;
    double d_min = 2.0;
    std::string hash = "splitmix64";
    std::vector<std::string> channels{"awgn"};
    double m = 1.5;
    std::vector<double> gamma_grid{0, 5, 10, 15, 20, 25, 30};
    double snr_db = std::numeric_limits<double>::infinity();  // roundtrip only; +inf is noiseless
    std::uint64_t trials = 1'000'000;
    std::optional<std::uint64_t> target_errors = 200;
    std::uint64_t seed = 1;
    std::vector<unsigned> quadrature_N{64};
    double x = 0.01;
    unsigned n_cap = 24;
    int precision = 6;
    std::string message;  // roundtrip: '0'/'1' string; empty draws one from the seed
    std::string out;
    Format format = Format::csv;
    unsigned threads = 0;  // from SPINAL_THREADS; 0 = all hardware threads

    nlohmann::json to_json() const;
};

/// Overlays the keys present in `doc` onto `cfg`. Throws ConfigError.
void apply_json(RunConfig& cfg, const nlohmann::json& doc);

/// "0,5,10", "0:5:30" (inclusive), "inf" or any comma-separated mix.
std::vector<double> parse_grid(const std::string& text);

/// Parses argv into (subcommand, config). Throws ConfigError; returns
/// nullopt when only --help/--version output was requested (already printed).
struct Invocation {
    std::string command;
    RunConfig config;
};
std::optional<Invocation> parse_command_line(int argc, const char* const* argv, std::ostream& out);

/// Per-command validation, run before any work.
void validate(const RunConfig& cfg, const std::string& command);

void cmd_bound(const RunConfig& cfg, std::ostream& out);
void cmd_floor(const RunConfig& cfg, std::ostream& out);
void cmd_threshold(const RunConfig& cfg, std::ostream& out);
void cmd_sweep(const RunConfig& cfg, std::ostream& out);
void cmd_roundtrip(const RunConfig& cfg, std::ostream& out);

/// Full entry point: parse, validate, run, route output to --out or `out`,
/// provenance to a sidecar (file output) or `err` (stdout CSV).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

inline constexpr const char* kSweepCsvHeader =
    "gamma_db,sigma2,trials,errors,bler,ci_low,ci_high,bound,floor,threshold_db";

}  // namespace spinal::cli
