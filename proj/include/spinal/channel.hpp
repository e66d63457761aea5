#pragma once

#include <random>
#include <string>

#include "spinal/codec.hpp"

namespace spinal {

enum class ChannelKind { awgn, rayleigh, nakagami };

/// Fading law with unit mean-square gain. `m` is only read for Nakagami.
struct ChannelModel {
    ChannelKind kind = ChannelKind::awgn;
    double m = 1.0;

    static ChannelModel awgn() { return {ChannelKind::awgn, 1.0}; }
    static ChannelModel rayleigh() { return {ChannelKind::rayleigh, 1.0}; }
    /// Throws ParameterError for m < 0.5.
    static ChannelModel nakagami(double m);

    void validate() const;

    friend bool operator==(const ChannelModel&, const ChannelModel&) = default;
};

std::string channel_name(ChannelKind kind);
/// "awgn", "rayleigh", "nakagami(m=1.5)"
std::string describe(const ChannelModel& model);

/// sigma2 is the total variance of the complex noise sample; each of the real
/// and imaginary parts carries sigma2 / 2.
struct NoiseSpec {
    double sigma2 = 0.0;
    double gamma_db = 0.0;
};

/// Average SNR of square 2^c-QAM: gamma = (2^c - 1) d_min^2 / (6 sigma2).
/// gamma_db = +inf gives sigma2 = 0.
NoiseSpec sigma_from_snr(double gamma_db, unsigned c, double d_min);
/// Inverse of sigma_from_snr, in dB.
double snr_from_sigma(double sigma2, unsigned c, double d_min);

using RngStream = std::mt19937_64;

/// AWGN: 1 exactly. Rayleigh and Nakagami: |h|^2 ~ Gamma(m, 1/m) (m = 1 for
/// Rayleigh) with an independent uniform phase.
cplx sample_fading(const ChannelModel& model, RngStream& rng);

/// y = h x + n for every entry, with h drawn fresh per entry. Entries are
/// drawn row by row, fading before noise.
ObservationGrid transmit(const CodedSymbolGrid& grid, const ChannelModel& model,
                         const NoiseSpec& noise, RngStream& rng);

}  // namespace spinal
