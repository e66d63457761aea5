#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <variant>

#include "spinal/analysis.hpp"
#include "spinal/channel.hpp"
#include "spinal/cli.hpp"
#include "spinal/codec.hpp"
#include "spinal/error.hpp"
#include "spinal/montecarlo.hpp"

namespace spinal::cli {
namespace {

using nlohmann::json;
using Cell = std::variant<double, std::uint64_t, std::string, bool>;

// Sweep columns are written with round-trip precision so every value can be
// recomputed bit-for-bit from the parameters.
constexpr int kExactDigits = 17;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    int precision = 6;
};

std::string format_double(double v, int precision) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

std::string format_cell(const Cell& cell, int precision) {
    return std::visit(
        [precision](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) return format_double(v, precision);
            else if constexpr (std::is_same_v<T, std::uint64_t>) return std::to_string(v);
            else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
            else return v;
        },
        cell);
}

json cell_json(const Cell& cell, int precision) {
    if (const auto* d = std::get_if<double>(&cell)) {
        if (!std::isfinite(*d)) return format_double(*d, precision);
        return std::strtod(format_double(*d, precision).c_str(), nullptr);
    }
    if (const auto* u = std::get_if<std::uint64_t>(&cell)) return *u;
    if (const auto* b = std::get_if<bool>(&cell)) return *b;
    return std::get<std::string>(cell);
}

void write_csv(const Table& t, std::ostream& out) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_cell(row[i], t.precision);
        out << '\n';
    }
}

json table_json(const Table& t) {
    json rows = json::array();
    for (const auto& row : t.rows) {
        json obj = json::object();
        for (std::size_t i = 0; i < row.size(); ++i) obj[t.columns[i]] = cell_json(row[i], t.precision);
        rows.push_back(std::move(obj));
    }
    return rows;
}

json provenance(const RunConfig& cfg, const std::string& command) {
    return json{{"tool", "spinal"},
                {"version", SPINAL_VERSION},
                {"command", command},
                {"master_seed", cfg.seed},
                {"hash_id", cfg.hash},
                {"config", cfg.to_json()}};
}

void emit(const Table& t, const RunConfig& cfg, const std::string& command, std::ostream& out) {
    if (cfg.format == Format::csv) {
        write_csv(t, out);
        return;
    }
    json doc{{"provenance", provenance(cfg, command)}, {"rows", table_json(t)}};
    out << doc.dump(2) << '\n';
}

ChannelModel make_model(const std::string& name, double m) {
    if (name == "awgn") return ChannelModel::awgn();
    if (name == "rayleigh") return ChannelModel::rayleigh();
    return ChannelModel::nakagami(m);
}

CodeParams make_params(const RunConfig& cfg) {
    return CodeParams({.n = cfg.n, .k = cfg.k, .c = cfg.c, .L = cfg.L, .v = cfg.v, .d_min = cfg.d_min,
                       .hash = *parse_hash(cfg.hash)});
}

std::string hex_word(std::uint64_t value, unsigned bits) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "0x%0*llx", static_cast<int>((bits + 3) / 4),
                  static_cast<unsigned long long>(value));
    return buf;
}

std::string format_point(cplx z) {
    return "(" + format_double(z.real(), 6) + "," + format_double(z.imag(), 6) + ")";
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

void cmd_bound(const RunConfig& cfg, std::ostream& out) {
    validate(cfg, "bound");
    const CodeParams params = make_params(cfg);
    const ChannelModel model = make_model(cfg.channels.front(), cfg.m);
    const double floor = error_floor(params).p_ef;

    Table t;
    t.precision = cfg.precision;
    t.columns = {"gamma_db", "sigma2", "floor"};
    std::vector<QuadratureScheme> schemes;
    for (unsigned N : cfg.quadrature_N) {
        schemes.push_back(quadrature_uniform(N));
        t.columns.push_back(cfg.quadrature_N.size() == 1 ? "bound" : "bound_N" + std::to_string(N));
    }
    for (double g : cfg.gamma_grid) {
        const double sigma2 = sigma_from_snr(g, cfg.c, cfg.d_min).sigma2;
        std::vector<Cell> row{g, sigma2, floor};
        for (const auto& scheme : schemes) row.emplace_back(bler_upper_bound(params, sigma2, model, scheme).p_e_upper);
        t.rows.push_back(std::move(row));
    }
    emit(t, cfg, "bound", out);
}

void cmd_floor(const RunConfig& cfg, std::ostream& out) {
    validate(cfg, "floor");
    const FloorResult f = error_floor(cfg.n, cfg.k, cfg.c, cfg.L);
    Table t;
    t.precision = cfg.precision;
    t.columns = {"n", "k", "c", "L", "p_ef"};
    t.rows.push_back({std::uint64_t{cfg.n}, std::uint64_t{cfg.k}, std::uint64_t{cfg.c}, std::uint64_t{cfg.L}, f.p_ef});
    emit(t, cfg, "floor", out);
}

void cmd_threshold(const RunConfig& cfg, std::ostream& out) {
    validate(cfg, "threshold");
    Table t;
    t.precision = cfg.precision;
    t.columns = {"channel", "m", "c", "x", "gamma_th_linear", "gamma_th_db", "plug_back"};
    for (const auto& name : cfg.channels) {
        const ChannelModel model = make_model(name, cfg.m);
        const ThresholdResult r = snr_threshold(model, cfg.c, cfg.x);
        t.rows.push_back({name, model.kind == ChannelKind::nakagami ? Cell{cfg.m} : Cell{std::string{}},
                          std::uint64_t{cfg.c}, cfg.x, r.gamma_th_linear, r.gamma_th_db, r.plug_back});
    }
    emit(t, cfg, "threshold", out);
}

void cmd_sweep(const RunConfig& cfg, std::ostream& out) {
    validate(cfg, "sweep");
    SweepConfig sc{.params = make_params(cfg),
                   .model = make_model(cfg.channels.front(), cfg.m),
                   .gamma_grid = cfg.gamma_grid,
                   .stop = {cfg.trials, cfg.target_errors},
                   .master_seed = cfg.seed,
                   .scheme = quadrature_uniform(cfg.quadrature_N.front()),
                   .x = cfg.x,
                   .decode = {cfg.n_cap}};
    const auto records = sweep(sc, ExecutionOptions{.threads = cfg.threads});

    Table t;
    t.precision = kExactDigits;
    t.columns = {"gamma_db", "sigma2", "trials", "errors", "bler", "ci_low", "ci_high", "bound", "floor", "threshold_db"};
    for (const auto& r : records)
        t.rows.push_back({r.gamma_db, r.sigma2, r.bler.trials, r.bler.errors, r.bler.p_hat, r.bler.ci_low,
                          r.bler.ci_high, r.bound, r.floor, r.threshold_db});
    emit(t, cfg, "sweep", out);
}

void cmd_roundtrip(const RunConfig& cfg, std::ostream& out) {
    validate(cfg, "roundtrip");
    const SpinalCode code(make_params(cfg));
    const CodeParams& p = code.params();
    const ChannelModel model = make_model(cfg.channels.front(), cfg.m);

    Message sent;
    if (cfg.message.empty()) {
        RngStream rng = trial_stream(cfg.seed, 0);
        sent = random_message(p.n(), rng);
    } else {
        std::vector<std::uint8_t> bits;
        for (char ch : cfg.message) bits.push_back(ch == '1' ? 1 : 0);
        sent = Message(std::move(bits));
    }
    const auto chain = spine_chain(sent, p);
    const CodedSymbolGrid grid = code.encode(sent);
    const NoiseSpec noise = sigma_from_snr(cfg.snr_db, p.c(), p.d_min());
    RngStream channel_rng = trial_stream(cfg.seed, 1);
    const ObservationGrid obs = transmit(grid, model, noise, channel_rng);
    const DecodeResult result = code.decode(obs, DecodeOptions{cfg.n_cap});
    const bool ok = result.message == sent;

    if (cfg.format == Format::json) {
        json spines = json::array();
        for (const auto& s : chain) spines.push_back(hex_word(s.value, p.v()));
        json symbols = json::array();
        for (std::size_t i = 0; i < grid.rows(); ++i) {
            json row = json::array();
            for (const auto& z : grid.row(i)) row.push_back({z.real(), z.imag()});
            symbols.push_back(row);
        }
        json doc{{"provenance", provenance(cfg, "roundtrip")},
                 {"channel", describe(model)},
                 {"snr_db", format_double(cfg.snr_db, 6)},
                 {"sigma2", noise.sigma2},
                 {"sent", sent.to_string()},
                 {"spines", spines},
                 {"symbols", symbols},
                 {"decoded", result.message.to_string()},
                 {"segment_costs", result.segment_costs},
                 {"cost", result.cost},
                 {"decoded_equals_sent", ok}};
        out << doc.dump(2) << '\n';
        return;
    }

    out << "params: n=" << p.n() << " k=" << p.k() << " v=" << p.v() << " c=" << p.c() << " L=" << p.L()
        << " dmin=" << format_double(p.d_min(), 6) << " hash=" << hash_name(p.hash_id()) << '\n';
    out << "channel: " << describe(model) << " snr_db=" << format_double(cfg.snr_db, 6)
        << " sigma2=" << format_double(noise.sigma2, 6) << '\n';
    out << "sent:    " << sent.to_string() << '\n';
    for (std::size_t i = 0; i < chain.size(); ++i)
        out << "spine[" << i + 1 << "] = " << hex_word(chain[i].value, p.v()) << '\n';
    for (std::size_t i = 0; i < grid.rows(); ++i) {
        out << "symbols[" << i + 1 << "] =";
        for (const auto& z : grid.row(i)) out << ' ' << format_point(z);
        out << '\n';
    }
    out << "decoded: " << result.message.to_string() << '\n';
    for (std::size_t i = 0; i < result.segment_costs.size(); ++i)
        out << "segment_cost[" << i + 1 << "] = " << format_double(result.segment_costs[i], 6) << '\n';
    out << "total_cost = " << format_double(result.cost, 6) << '\n';
    out << "decoded == sent: " << (ok ? "true" : "false") << '\n';
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    try {
        auto inv = parse_command_line(argc, argv, out);
        if (!inv) return kExitOk;
        RunConfig& cfg = inv->config;
        if (const char* env = std::getenv("SPINAL_THREADS"); env && *env) {
            char* end = nullptr;
            const unsigned long t = std::strtoul(env, &end, 10);
            if (*end != '\0' || t == 0 || t > 4096)
                throw ConfigError("SPINAL_THREADS", std::string("expected a positive integer, got '") + env + "'");
            cfg.threads = static_cast<unsigned>(t);
        }
        validate(cfg, inv->command);

        std::ostringstream body;
        if (inv->command == "bound") cmd_bound(cfg, body);
        else if (inv->command == "floor") cmd_floor(cfg, body);
        else if (inv->command == "threshold") cmd_threshold(cfg, body);
        else if (inv->command == "sweep") cmd_sweep(cfg, body);
        else cmd_roundtrip(cfg, body);

        json meta = provenance(cfg, inv->command);
        if (cfg.out.empty()) {
            out << body.str();
            if (cfg.format == Format::csv) err << "# provenance " << meta.dump() << '\n';
        } else {
            std::ofstream file(cfg.out, std::ios::binary);
            if (!file) throw ConfigError("out", "cannot write '" + cfg.out + "'");
            file << body.str();
            if (cfg.format == Format::csv) {
                meta["generated_at"] = utc_timestamp();
                std::ofstream side(cfg.out + ".meta.json", std::ios::binary);
                side << meta.dump(2) << '\n';
            }
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const BudgetExceeded& e) {
        err << "budget exceeded: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const ParameterError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

}  // namespace spinal::cli
