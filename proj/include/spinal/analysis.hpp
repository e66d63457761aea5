#pragma once

// Finite-blocklength analysis of ML-decoded Spinal codes: the quadrature
// union bound on BLER, its sigma -> 0 limit (the error floor), and the SNR at
// which the floor takes over.
//
// Probabilities that can fall below the double range are carried as log2
// values; the clamped per-segment terms are reported in both forms.

#include <cstdint>
#include <vector>

#include "spinal/channel.hpp"
#include "spinal/codec.hpp"

namespace spinal {

/// Angles 0 = theta_0 < ... < theta_N = pi/2 with weights
/// b_t = (theta_t - theta_{t-1}) / pi, t = 1..N. `weights[t-1]` pairs with
/// `angles[t]`.
struct QuadratureScheme {
    std::vector<double> angles;
    std::vector<double> weights;

    std::size_t size() const noexcept { return weights.size(); }
};

inline constexpr unsigned kDefaultQuadratureN = 64;

/// theta_t = t pi / (2N), b_t = 1 / (2N).
QuadratureScheme quadrature_uniform(unsigned N = kDefaultQuadratureN);
/// Arbitrary partition; throws ParameterError unless strictly increasing from
/// 0 to pi/2.
QuadratureScheme quadrature_from_angles(std::vector<double> angles);

/// Ordered-pair distance multiplicities of a square QAM grid. Distances are
/// keyed exactly by their squared value in units of d_min^2.
struct DistanceSpectrum {
    struct Entry {
        std::uint64_t dist2_units = 0;  // |beta_i - beta_j|^2 / d_min^2
        double distance = 0.0;          // d_min * sqrt(dist2_units)
        std::uint64_t multiplicity = 0; // A_d
    };

    unsigned c = 0;
    double d_min = 0.0;
    std::vector<Entry> entries;  // ascending distance

    std::uint64_t total_pairs() const noexcept;
    /// A_d for |beta_i - beta_j|^2 = dist2_units * d_min^2; 0 if absent.
    std::uint64_t multiplicity(std::uint64_t dist2_units) const noexcept;
};

DistanceSpectrum distance_spectrum(const Constellation& psi);

/// E_H[exp(-|H|^2 delta2 / (4 sigma2 sin^2 theta))]. Returns 1 for
/// delta2 = 0 and the limit 0 for sigma2 = 0 with delta2 > 0.
double pairwise_expectation(const ChannelModel& model, double delta2, double sigma2, double theta);

/// Sum over all ordered constellation pairs of pairwise_expectation.
double g_value(const DistanceSpectrum& spectrum, double sigma2, double theta, const ChannelModel& model);
double g_value(const Constellation& psi, double sigma2, double theta, const ChannelModel& model);

/// log2 of F(L_a, sigma) = sum_t b_t (2^{-2c} G(theta_t))^{L_a}.
double log2_f_term(unsigned L_a, double sigma2, const DistanceSpectrum& spectrum,
                   const QuadratureScheme& scheme, const ChannelModel& model);
double f_term(unsigned L_a, double sigma2, const Constellation& psi,
              const QuadratureScheme& scheme, const ChannelModel& model);

/// Term a of the product, min{1, (2^k - 1) 2^{n - a k} F(L_a, sigma)}.
struct SegmentTerm {
    unsigned a = 0;       // 1-based segment index
    unsigned L_a = 0;     // L (n/k - a + 1)
    double log2_f = 0.0;  // log2 F(L_a, sigma)
    double log2_raw = 0.0;  // log2 of the unclamped term
    double clamped = 0.0;
};

struct BoundResult {
    double p_e_upper = 1.0;
    std::vector<SegmentTerm> per_segment;
};

struct FloorResult {
    double p_ef = 1.0;
    std::vector<SegmentTerm> per_segment;
};

BoundResult bler_upper_bound(const CodeParams& params, double sigma2, const ChannelModel& model,
                             const QuadratureScheme& scheme = quadrature_uniform());

/// Error floor 1 - prod_a (1 - min{1, (2^k - 1) 2^{n - a k - L_a c - 1}}).
FloorResult error_floor(const CodeParams& params);
/// Same closed form without the square-QAM restriction on c (any c >= 1).
FloorResult error_floor(unsigned n, unsigned k, unsigned c, unsigned L);

struct ThresholdResult {
    double gamma_th_linear = 0.0;
    double gamma_th_db = 0.0;
    double x = 0.0;
    unsigned c = 0;
    ChannelModel model;
    /// 4 E_H[exp(-3 |H|^2 gamma_th / (2 (2^c - 1)))] evaluated back at the
    /// threshold; equals x up to rounding.
    double plug_back = 0.0;
};

inline constexpr double kDefaultThresholdPrecision = 0.01;

/// Closed-form SNR threshold of the error floor; needs 0 < x < 4 and even c.
ThresholdResult snr_threshold(const ChannelModel& model, unsigned c, double x = kDefaultThresholdPrecision);

/// 4 E_H[exp(-3 |H|^2 gamma / (2 (2^c - 1)))] for a linear SNR gamma, through
/// pairwise_expectation at theta = pi/2.
double threshold_condition(const ChannelModel& model, unsigned c, double gamma_linear);

}  // namespace spinal
