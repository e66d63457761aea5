#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "spinal/analysis.hpp"
#include "spinal/channel.hpp"
#include "spinal/cli.hpp"
#include "spinal/hash.hpp"

namespace spinal::cli {
namespace {

using nlohmann::json;

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) parts.push_back(item);
    }
    return parts;
}

double parse_number(const std::string& field, const std::string& token) {
    if (token == "inf" || token == "+inf") return std::numeric_limits<double>::infinity();
    if (token == "-inf") return -std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(token, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != token.size() || token.empty()) throw ConfigError(field, "'" + token + "' is not a number");
    return value;
}

template <typename T>
T get_as(const json& doc, const char* key) {
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(key, std::string("bad value: ") + e.what());
    }
}

std::vector<double> grid_from_json(const json& v, const char* key) {
    if (v.is_string()) {
        return parse_grid(v.get<std::string>());
    }
    if (!v.is_array()) throw ConfigError(key, "expected an array or a grid string");
    std::vector<double> out;
    for (const auto& item : v) {
        if (item.is_number())
            out.push_back(item.get<double>());
        else if (item.is_string())
            out.push_back(parse_number(key, item.get<std::string>()));
        else
            throw ConfigError(key, "grid entries must be numbers");
    }
    return out;
}

bool strictly_ascending(const std::vector<double>& g) {
    for (std::size_t i = 1; i < g.size(); ++i)
        if (!(g[i] > g[i - 1])) return false;
    return true;
}

void check_channel(const std::string& name, double m) {
    if (name != "awgn" && name != "rayleigh" && name != "nakagami")
        throw ConfigError("channel", "unknown channel '" + name + "' (expected awgn, rayleigh or nakagami)");
    if (name == "nakagami" && !(m >= 0.5 && std::isfinite(m)))
        throw ConfigError("m", "Nakagami shape must be >= 0.5");
}

void check_code(const RunConfig& cfg) {
    if (cfg.k == 0 || cfg.k > 64) throw ConfigError("k", "must be in [1, 64]");
    if (cfg.n == 0 || cfg.n % cfg.k != 0) throw ConfigError("k", "must divide n");
    if (cfg.c < 2 || cfg.c > 16 || cfg.c % 2 != 0) throw ConfigError("c", "must be even and in [2, 16]");
    if (cfg.v < cfg.k || cfg.v > 64) throw ConfigError("v", "must satisfy k <= v <= 64");
    if (cfg.L == 0) throw ConfigError("L", "must be >= 1");
    if (!(cfg.d_min > 0.0) || !std::isfinite(cfg.d_min)) throw ConfigError("dmin", "must be > 0");
}

void check_single_channel(const RunConfig& cfg) {
    if (cfg.channels.size() != 1) throw ConfigError("channel", "this command takes exactly one channel");
    check_channel(cfg.channels.front(), cfg.m);
}

void check_grid(const RunConfig& cfg) {
    if (cfg.gamma_grid.empty()) throw ConfigError("gamma_grid", "must not be empty");
    for (double g : cfg.gamma_grid)
        if (std::isnan(g) || g == -std::numeric_limits<double>::infinity())
            throw ConfigError("gamma_grid", "entries must be numbers or +inf");
    if (!strictly_ascending(cfg.gamma_grid)) throw ConfigError("gamma_grid", "must be strictly ascending");
}

void check_x(const RunConfig& cfg) {
    if (!(cfg.x > 0.0 && cfg.x < 4.0)) throw ConfigError("x", "threshold precision must satisfy 0 < x < 4");
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    for (const auto& part : split(text, ',')) {
        const auto range = split(part, ':');
        if (range.size() == 1) {
            out.push_back(parse_number("gamma_grid", range[0]));
        } else if (range.size() == 3) {
            const double start = parse_number("gamma_grid", range[0]);
            const double step = parse_number("gamma_grid", range[1]);
            const double stop = parse_number("gamma_grid", range[2]);
            if (!(step > 0.0) || !std::isfinite(start) || !std::isfinite(stop))
                throw ConfigError("gamma_grid", "range '" + part + "' needs finite ends and a positive step");
            const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
            for (long i = 0; i <= count; ++i) out.push_back(start + static_cast<double>(i) * step);
        } else {
            throw ConfigError("gamma_grid", "cannot parse '" + part + "'");
        }
    }
    if (out.empty()) throw ConfigError("gamma_grid", "must not be empty");
    return out;
}

json RunConfig::to_json() const {
    json j;
    j["n"] = n;
    j["k"] = k;
    j["v"] = v;
    j["c"] = c;
    j["L"] = L;
    j["dmin"] = d_min;
    j["hash"] = hash;
    j["channel"] = channels;
    j["m"] = m;
    json grid = json::array();
    for (double g : gamma_grid) grid.push_back(std::isfinite(g) ? json(g) : json(g > 0 ? "inf" : "-inf"));
    j["gamma_grid"] = grid;
    j["snr"] = std::isfinite(snr_db) ? json(snr_db) : json("inf");
    j["trials"] = trials;
    j["target_errors"] = target_errors ? json(*target_errors) : json(nullptr);
    j["seed"] = seed;
    j["quadrature_N"] = quadrature_N;
    j["x"] = x;
    j["n_cap"] = n_cap;
    j["precision"] = precision;
    j["message"] = message;
    j["format"] = format == Format::csv ? "csv" : "json";
    return j;
}

void apply_json(RunConfig& cfg, const json& doc) {
    if (!doc.is_object()) throw ConfigError("config", "top level must be a JSON object");
    static const std::vector<std::string> known{
        "n", "k", "v", "c", "L", "dmin", "hash", "channel", "m", "gamma_grid", "snr_grid", "snr",
        "trials", "target_errors", "seed", "quadrature_N", "x", "n_cap", "precision", "message",
        "out", "format"};
    for (const auto& [key, _] : doc.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError(key, "unknown configuration key");

    if (doc.contains("n")) cfg.n = get_as<unsigned>(doc, "n");
    if (doc.contains("k")) cfg.k = get_as<unsigned>(doc, "k");
    if (doc.contains("v")) cfg.v = get_as<unsigned>(doc, "v");
    if (doc.contains("c")) cfg.c = get_as<unsigned>(doc, "c");
    if (doc.contains("L")) cfg.L = get_as<unsigned>(doc, "L");
    if (doc.contains("dmin")) cfg.d_min = get_as<double>(doc, "dmin");
    if (doc.contains("hash")) cfg.hash = get_as<std::string>(doc, "hash");
    if (doc.contains("channel")) {
        const auto& ch = doc.at("channel");
        cfg.channels = ch.is_array() ? get_as<std::vector<std::string>>(doc, "channel")
                                     : split(get_as<std::string>(doc, "channel"), ',');
    }
    if (doc.contains("m")) cfg.m = get_as<double>(doc, "m");
    if (doc.contains("snr_grid")) cfg.gamma_grid = grid_from_json(doc.at("snr_grid"), "gamma_grid");
    if (doc.contains("gamma_grid")) cfg.gamma_grid = grid_from_json(doc.at("gamma_grid"), "gamma_grid");
    if (doc.contains("snr")) {
        const auto& s = doc.at("snr");
        cfg.snr_db = s.is_string() ? parse_number("snr", s.get<std::string>()) : get_as<double>(doc, "snr");
    }
    if (doc.contains("trials")) cfg.trials = get_as<std::uint64_t>(doc, "trials");
    if (doc.contains("target_errors")) {
        const auto& t = doc.at("target_errors");
        cfg.target_errors = t.is_null() ? std::nullopt : std::optional(get_as<std::uint64_t>(doc, "target_errors"));
    }
    if (doc.contains("seed")) cfg.seed = get_as<std::uint64_t>(doc, "seed");
    if (doc.contains("quadrature_N")) {
        const auto& q = doc.at("quadrature_N");
        cfg.quadrature_N = q.is_array() ? get_as<std::vector<unsigned>>(doc, "quadrature_N")
                                        : std::vector<unsigned>{get_as<unsigned>(doc, "quadrature_N")};
    }
    if (doc.contains("x")) cfg.x = get_as<double>(doc, "x");
    if (doc.contains("n_cap")) cfg.n_cap = get_as<unsigned>(doc, "n_cap");
    if (doc.contains("precision")) cfg.precision = get_as<int>(doc, "precision");
    if (doc.contains("message")) cfg.message = get_as<std::string>(doc, "message");
    if (doc.contains("out")) cfg.out = get_as<std::string>(doc, "out");
    if (doc.contains("format")) {
        const auto f = get_as<std::string>(doc, "format");
        if (f != "csv" && f != "json") throw ConfigError("format", "expected csv or json");
        cfg.format = f == "csv" ? Format::csv : Format::json;
    }
}

std::optional<Invocation> parse_command_line(int argc, const char* const* argv, std::ostream& out) {
    CLI::App app{"Spinal codes: encoder, ML decoder, error-floor analysis and BLER sweeps", "spinal"};
    app.set_version_flag("--version", std::string("spinal ") + SPINAL_VERSION);

    std::string command;
    app.add_option("command", command, "bound | floor | threshold | sweep | roundtrip")
        ->required()
        ->check(CLI::IsMember({"bound", "floor", "threshold", "sweep", "roundtrip"}));

    std::string config_path;
    app.add_option("--config", config_path, "JSON configuration file; flags override its keys");

    // Flags are read as strings and overlaid through apply_json so that file
    // and command-line values share one validation path.
    std::string n, k, v, c, L, dmin, channel, m, grid, snr, trials, target, seed, quad, x, out_path,
        format, hash, ncap, precision, message;
    struct Flag {
        const char* name;
        std::string* value;
        std::string help;
    };
    const std::vector<Flag> flags{
        {"--n", &n, "message length in bits"},
        {"--k", &k, "segment length in bits"},
        {"--v", &v, "spine width in bits (default 32)"},
        {"--c", &c, "bits per QAM symbol (even)"},
        {"--L", &L, "number of passes"},
        {"--dmin", &dmin, "minimum constellation distance"},
        {"--channel", &channel, "awgn | rayleigh | nakagami (comma list for threshold)"},
        {"--m", &m, "Nakagami shape parameter"},
        {"--snr-grid", &grid, "SNR grid in dB: 0,5,10 or 0:5:30; 'inf' allowed"},
        {"--snr", &snr, "roundtrip SNR in dB (default inf)"},
        {"--trials", &trials, "trial cap per grid point"},
        {"--target-errors", &target, "stop after this many errors ('none' for a fixed count)"},
        {"--seed", &seed, "master seed"},
        {"--quadrature-N", &quad, "quadrature size(s), comma separated"},
        {"--x", &x, "threshold precision constant"},
        {"--out", &out_path, "output file (default stdout)"},
        {"--format", &format, "csv | json"},
        {"--hash", &hash, "hash id (" + registered_hash_list() + ")"},
        {"--n-cap", &ncap, "largest n the exhaustive decoder accepts"},
        {"--precision", &precision, "significant digits for bound/floor/threshold tables"},
        {"--message", &message, "roundtrip message as a 0/1 string"},
    };
    for (const auto& f : flags) app.add_option(f.name, *f.value, f.help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return std::nullopt;
    } catch (const CLI::CallForVersion&) {
        out << app.version() << "\n";
        return std::nullopt;
    } catch (const CLI::ParseError& e) {
        throw ConfigError("command line", e.what());
    }

    Invocation inv;
    inv.command = command;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw ConfigError("config", "cannot open '" + config_path + "'");
        json doc;
        try {
            doc = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ConfigError("config", e.what());
        }
        apply_json(inv.config, doc);
    }

    json overlay = json::object();
    auto given = [&](const char* name) { return app.count(name) > 0; };
    auto as_uint = [](const char* field, const std::string& s) -> json {
        if (!s.empty() && s.find_first_not_of("0123456789") == std::string::npos) {
            try {
                return json(static_cast<std::uint64_t>(std::stoull(s)));
            } catch (const std::out_of_range&) {
                throw ConfigError(field, "'" + s + "' is out of range");
            }
        }
        // 1e5 style
        const double d = parse_number(field, s);
        if (!(d >= 0) || d != std::floor(d) || d > 9007199254740992.0)
            throw ConfigError(field, "'" + s + "' is not a non-negative integer");
        return json(static_cast<std::uint64_t>(d));
    };
    if (given("--n")) overlay["n"] = as_uint("n", n);
    if (given("--k")) overlay["k"] = as_uint("k", k);
    if (given("--v")) overlay["v"] = as_uint("v", v);
    if (given("--c")) overlay["c"] = as_uint("c", c);
    if (given("--L")) overlay["L"] = as_uint("L", L);
    if (given("--dmin")) overlay["dmin"] = parse_number("dmin", dmin);
    if (given("--channel")) overlay["channel"] = channel;
    if (given("--m")) overlay["m"] = parse_number("m", m);
    if (given("--snr-grid")) overlay["gamma_grid"] = grid;
    if (given("--snr")) overlay["snr"] = snr;
    if (given("--trials")) overlay["trials"] = as_uint("trials", trials);
    if (given("--target-errors"))
        overlay["target_errors"] = (target == "none") ? json(nullptr) : as_uint("target_errors", target);
    if (given("--seed")) overlay["seed"] = as_uint("seed", seed);
    if (given("--quadrature-N")) {
        json list = json::array();
        for (const auto& part : split(quad, ',')) list.push_back(as_uint("quadrature_N", part));
        overlay["quadrature_N"] = list;
    }
    if (given("--x")) overlay["x"] = parse_number("x", x);
    if (given("--out")) overlay["out"] = out_path;
    if (given("--format")) overlay["format"] = format;
    if (given("--hash")) overlay["hash"] = hash;
    if (given("--n-cap")) overlay["n_cap"] = as_uint("n_cap", ncap);
    if (given("--precision")) overlay["precision"] = as_uint("precision", precision);
    if (given("--message")) overlay["message"] = message;
    apply_json(inv.config, overlay);
    return inv;
}

void validate(const RunConfig& cfg, const std::string& command) {
    if (!parse_hash(cfg.hash))
        throw ConfigError("hash", "unknown hash '" + cfg.hash + "'; registered: " + registered_hash_list());
    if (cfg.precision < 1 || cfg.precision > 17) throw ConfigError("precision", "must be in [1, 17]");

    if (command == "bound") {
        check_code(cfg);
        check_single_channel(cfg);
        check_grid(cfg);
        if (cfg.quadrature_N.empty()) throw ConfigError("quadrature_N", "must list at least one size");
        for (unsigned q : cfg.quadrature_N)
            if (q == 0) throw ConfigError("quadrature_N", "sizes must be >= 1");
    } else if (command == "floor") {
        if (cfg.k == 0) throw ConfigError("k", "must be >= 1");
        if (cfg.n == 0 || cfg.n % cfg.k != 0) throw ConfigError("k", "must divide n");
        if (cfg.c == 0) throw ConfigError("c", "must be >= 1");
        if (cfg.L == 0) throw ConfigError("L", "must be >= 1");
    } else if (command == "threshold") {
        if (cfg.c < 2 || cfg.c % 2 != 0 || cfg.c > 62) throw ConfigError("c", "must be even");
        check_x(cfg);
        if (cfg.channels.empty()) throw ConfigError("channel", "at least one channel is required");
        for (const auto& ch : cfg.channels) check_channel(ch, cfg.m);
    } else if (command == "sweep") {
        check_code(cfg);
        check_single_channel(cfg);
        check_grid(cfg);
        check_x(cfg);
        if (cfg.trials == 0) throw ConfigError("trials", "must be >= 1");
        if (cfg.target_errors && *cfg.target_errors == 0) throw ConfigError("target_errors", "must be >= 1");
        if (cfg.quadrature_N.empty() || cfg.quadrature_N.front() == 0)
            throw ConfigError("quadrature_N", "sizes must be >= 1");
    } else if (command == "roundtrip") {
        check_code(cfg);
        check_single_channel(cfg);
        if (std::isnan(cfg.snr_db)) throw ConfigError("snr", "must be a number");
        if (!cfg.message.empty()) {
            if (cfg.message.size() != cfg.n)
                throw ConfigError("message", "has " + std::to_string(cfg.message.size()) + " bits, expected n=" +
                                                 std::to_string(cfg.n));
            if (cfg.message.find_first_not_of("01") != std::string::npos)
                throw ConfigError("message", "must contain only 0 and 1");
        }
    } else {
        throw ConfigError("command", "unknown command '" + command + "'");
    }
}

}  // namespace spinal::cli
