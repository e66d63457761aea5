#include "spinal/channel.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "spinal/error.hpp"

namespace spinal {
namespace {

double qam_energy_factor(unsigned c) {
    if (c == 0 || c % 2 != 0 || c > 62)
        throw UnsupportedModulation("SNR conversion needs even c, got " + std::to_string(c));
    return static_cast<double>((std::uint64_t{1} << c) - 1) / 6.0;
}

}  // namespace

ChannelModel ChannelModel::nakagami(double m) {
    ChannelModel model{ChannelKind::nakagami, m};
    model.validate();
    return model;
}

void ChannelModel::validate() const {
    if (kind == ChannelKind::nakagami && !(m >= 0.5 && std::isfinite(m)))
        throw ParameterError("Nakagami shape m must be >= 0.5");
}

std::string channel_name(ChannelKind kind) {
    switch (kind) {
        case ChannelKind::awgn: return "awgn";
        case ChannelKind::rayleigh: return "rayleigh";
        case ChannelKind::nakagami: return "nakagami";
    }
    return "unknown";
}

std::string describe(const ChannelModel& model) {
    if (model.kind != ChannelKind::nakagami) return channel_name(model.kind);
    char buf[64];
    std::snprintf(buf, sizeof buf, "nakagami(m=%g)", model.m);
    return buf;
}

NoiseSpec sigma_from_snr(double gamma_db, unsigned c, double d_min) {
    const double es = qam_energy_factor(c) * d_min * d_min;
    if (std::isnan(gamma_db)) throw ParameterError("SNR is NaN");
    NoiseSpec out;
    out.gamma_db = gamma_db;
    out.sigma2 = es / std::pow(10.0, gamma_db / 10.0);
    return out;
}

double snr_from_sigma(double sigma2, unsigned c, double d_min) {
    return 10.0 * std::log10(qam_energy_factor(c) * d_min * d_min / sigma2);
}

cplx sample_fading(const ChannelModel& model, RngStream& rng) {
    switch (model.kind) {
        case ChannelKind::awgn:
            return {1.0, 0.0};
        case ChannelKind::rayleigh: {
            // CN(0, 1): unit-variance circular Gaussian
            std::normal_distribution<double> g(0.0, std::numbers::sqrt2 / 2.0);
            const double re = g(rng);
            const double im = g(rng);
            return {re, im};
        }
        case ChannelKind::nakagami: {
            model.validate();
            std::gamma_distribution<double> power(model.m, 1.0 / model.m);
            std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
            const double amp = std::sqrt(power(rng));
            return std::polar(amp, phase(rng));
        }
    }
    return {1.0, 0.0};
}

ObservationGrid transmit(const CodedSymbolGrid& grid, const ChannelModel& model,
                         const NoiseSpec& noise, RngStream& rng) {
    model.validate();
    if (!(noise.sigma2 >= 0.0) || !std::isfinite(noise.sigma2))
        throw ParameterError("noise variance must be finite and >= 0");
    const double sd = std::sqrt(noise.sigma2 / 2.0);
    std::normal_distribution<double> awgn(0.0, 1.0);
    ObservationGrid out(grid.rows(), grid.cols());
    for (std::size_t i = 0; i < grid.rows(); ++i) {
        for (std::size_t j = 0; j < grid.cols(); ++j) {
            const cplx h = sample_fading(model, rng);
            const double nr = awgn(rng);
            const double ni = awgn(rng);
            out(i, j) = Observation{h * grid(i, j) + cplx(sd * nr, sd * ni), h};
        }
    }
    return out;
}

}  // namespace spinal
