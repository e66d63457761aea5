#include "spinal/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "spinal/error.hpp"

namespace spinal {
namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

// 1 - prod_a (1 - min{1, (2^k - 1) 2^{n - a k} F_a}) from log2 F_a.
template <typename Log2F>
std::pair<double, std::vector<SegmentTerm>> union_product(unsigned n, unsigned k, unsigned L,
                                                          Log2F&& log2_f) {
    const unsigned segments = n / k;
    const double log2_branches = std::log2(std::ldexp(1.0, static_cast<int>(k)) - 1.0);
    std::vector<SegmentTerm> terms;
    terms.reserve(segments);
    double log_survive = 0.0;
    bool saturated = false;
    for (unsigned a = 1; a <= segments; ++a) {
        SegmentTerm t;
        t.a = a;
        t.L_a = L * (segments - a + 1);
        t.log2_f = log2_f(t.L_a);
        t.log2_raw = log2_branches + (static_cast<double>(n) - static_cast<double>(a) * k) + t.log2_f;
        t.clamped = t.log2_raw >= 0.0 ? 1.0 : std::exp2(t.log2_raw);
        if (t.clamped >= 1.0)
            saturated = true;
        else
            log_survive += std::log1p(-t.clamped);
        terms.push_back(t);
    }
    const double p = saturated ? 1.0 : -std::expm1(log_survive);
    return {std::clamp(p, 0.0, 1.0), std::move(terms)};
}

double zero_noise_log2_f(unsigned L_a, unsigned c) {
    return -(static_cast<double>(L_a) * c) - 1.0;
}

}  // namespace

QuadratureScheme quadrature_uniform(unsigned N) {
    if (N == 0) throw ParameterError("quadrature needs N >= 1");
    QuadratureScheme q;
    q.angles.resize(N + 1);
    for (unsigned t = 0; t <= N; ++t) q.angles[t] = t * std::numbers::pi / (2.0 * N);
    q.angles[N] = kHalfPi;
    q.weights.assign(N, 1.0 / (2.0 * N));
    return q;
}

QuadratureScheme quadrature_from_angles(std::vector<double> angles) {
    if (angles.size() < 2) throw ParameterError("quadrature needs at least two angles");
    if (angles.front() != 0.0 || angles.back() != kHalfPi)
        throw ParameterError("quadrature angles must run from 0 to pi/2");
    QuadratureScheme q;
    q.weights.reserve(angles.size() - 1);
    for (std::size_t t = 1; t < angles.size(); ++t) {
        if (!(angles[t] > angles[t - 1])) throw ParameterError("quadrature angles must be strictly increasing");
        q.weights.push_back((angles[t] - angles[t - 1]) / std::numbers::pi);
    }
    q.angles = std::move(angles);
    return q;
}

std::uint64_t DistanceSpectrum::total_pairs() const noexcept {
    std::uint64_t total = 0;
    for (const auto& e : entries) total += e.multiplicity;
    return total;
}

std::uint64_t DistanceSpectrum::multiplicity(std::uint64_t dist2_units) const noexcept {
    for (const auto& e : entries)
        if (e.dist2_units == dist2_units) return e.multiplicity;
    return 0;
}

DistanceSpectrum distance_spectrum(const Constellation& psi) {
    // On a side x side grid, (side - |dx|)(side - |dy|) ordered pairs differ by
    // the offset (dx, dy).
    const auto side = static_cast<std::int64_t>(psi.side());
    std::map<std::uint64_t, std::uint64_t> counts;
    for (std::int64_t dx = -(side - 1); dx <= side - 1; ++dx)
        for (std::int64_t dy = -(side - 1); dy <= side - 1; ++dy)
            counts[static_cast<std::uint64_t>(dx * dx + dy * dy)] +=
                static_cast<std::uint64_t>((side - std::abs(dx)) * (side - std::abs(dy)));

    DistanceSpectrum spec;
    spec.c = psi.c();
    spec.d_min = psi.d_min();
    spec.entries.reserve(counts.size());
    for (const auto& [units, mult] : counts)
        spec.entries.push_back({units, psi.d_min() * std::sqrt(static_cast<double>(units)), mult});
    return spec;
}

double pairwise_expectation(const ChannelModel& model, double delta2, double sigma2, double theta) {
    model.validate();
    if (!(theta > 0.0 && theta <= kHalfPi)) throw ParameterError("theta must lie in (0, pi/2]");
    if (!(delta2 >= 0.0) || !(sigma2 >= 0.0)) throw ParameterError("delta2 and sigma2 must be >= 0");
    if (delta2 == 0.0) return 1.0;
    if (sigma2 == 0.0) return 0.0;
    const double s = std::sin(theta);
    const double A = delta2 / (4.0 * sigma2 * s * s);
    switch (model.kind) {
        case ChannelKind::awgn: return std::exp(-A);
        case ChannelKind::rayleigh: return 1.0 / (1.0 + A);
        case ChannelKind::nakagami: return std::pow(model.m / (model.m + A), model.m);
    }
    return 1.0;
}

double g_value(const DistanceSpectrum& spectrum, double sigma2, double theta, const ChannelModel& model) {
    const double d2 = spectrum.d_min * spectrum.d_min;
    double g = 0.0;
    for (const auto& e : spectrum.entries)
        g += static_cast<double>(e.multiplicity) *
             pairwise_expectation(model, static_cast<double>(e.dist2_units) * d2, sigma2, theta);
    return g;
}

double g_value(const Constellation& psi, double sigma2, double theta, const ChannelModel& model) {
    return g_value(distance_spectrum(psi), sigma2, theta, model);
}

double log2_f_term(unsigned L_a, double sigma2, const DistanceSpectrum& spectrum,
                   const QuadratureScheme& scheme, const ChannelModel& model) {
    if (L_a == 0) throw ParameterError("L_a must be >= 1");
    if (scheme.size() == 0) throw ParameterError("empty quadrature scheme");
    const double two_c = 2.0 * spectrum.c;
    // log2(b_t (2^{-2c} G_t)^{L_a}), then a weighted log-sum-exp in base 2.
    std::vector<double> logs(scheme.size());
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < scheme.size(); ++t) {
        const double g = g_value(spectrum, sigma2, scheme.angles[t + 1], model);
        logs[t] = L_a * (std::log2(g) - two_c) + std::log2(scheme.weights[t]);
        peak = std::max(peak, logs[t]);
    }
    double acc = 0.0;
    for (double l : logs) acc += std::exp2(l - peak);
    return peak + std::log2(acc);
}

double f_term(unsigned L_a, double sigma2, const Constellation& psi,
              const QuadratureScheme& scheme, const ChannelModel& model) {
    return std::exp2(log2_f_term(L_a, sigma2, distance_spectrum(psi), scheme, model));
}

BoundResult bler_upper_bound(const CodeParams& params, double sigma2, const ChannelModel& model,
                             const QuadratureScheme& scheme) {
    if (!(sigma2 >= 0.0)) throw ParameterError("sigma2 must be >= 0");
    model.validate();
    const auto spectrum = distance_spectrum(build_constellation(params.c(), params.d_min()));
    auto log2_f = [&](unsigned L_a) {
        // G = 2^c exactly at sigma = 0, so F reduces to 2^{-L_a c - 1}.
        if (sigma2 == 0.0) return zero_noise_log2_f(L_a, params.c());
        return log2_f_term(L_a, sigma2, spectrum, scheme, model);
    };
    auto [p, terms] = union_product(params.n(), params.k(), params.L(), log2_f);
    return {p, std::move(terms)};
}

FloorResult error_floor(const CodeParams& params) {
    return error_floor(params.n(), params.k(), params.c(), params.L());
}

FloorResult error_floor(unsigned n, unsigned k, unsigned c, unsigned L) {
    if (k == 0 || n == 0 || n % k != 0) throw ParameterError("k must divide n (n/k >= 1)");
    if (c == 0) throw ParameterError("c must be >= 1");
    if (L == 0) throw ParameterError("L must be >= 1");
    auto [p, terms] = union_product(n, k, L, [c](unsigned L_a) { return zero_noise_log2_f(L_a, c); });
    return {p, std::move(terms)};
}

double threshold_condition(const ChannelModel& model, unsigned c, double gamma_linear) {
    // With d_min = 1 the pairwise argument |H|^2 d_min^2 / (4 sigma2) becomes
    // 3 |H|^2 gamma / (2 (2^c - 1)).
    const NoiseSpec noise = sigma_from_snr(10.0 * std::log10(gamma_linear), c, 1.0);
    return 4.0 * pairwise_expectation(model, 1.0, noise.sigma2, kHalfPi);
}

ThresholdResult snr_threshold(const ChannelModel& model, unsigned c, double x) {
    model.validate();
    if (c == 0 || c % 2 != 0) throw UnsupportedModulation("threshold needs even c");
    if (!(x > 0.0 && x < 4.0)) throw ParameterError("precision x must satisfy 0 < x < 4");
    const double q = std::ldexp(1.0, static_cast<int>(c)) - 1.0;
    ThresholdResult r;
    r.x = x;
    r.c = c;
    r.model = model;
    switch (model.kind) {
        case ChannelKind::awgn:
            r.gamma_th_linear = 2.0 * q / 3.0 * std::log(4.0 / x);
            break;
        case ChannelKind::rayleigh:
            r.gamma_th_linear = 2.0 * q / 3.0 * (4.0 / x - 1.0);
            break;
        case ChannelKind::nakagami:
            r.gamma_th_linear = 2.0 * model.m * q / 3.0 * (std::pow(4.0 / x, 1.0 / model.m) - 1.0);
            break;
    }
    r.gamma_th_db = 10.0 * std::log10(r.gamma_th_linear);
    r.plug_back = threshold_condition(model, c, r.gamma_th_linear);
    if (!(std::abs(r.plug_back - x) <= 1e-9 * x))
        throw std::logic_error("threshold does not reproduce the requested precision x");
    return r;
}

}  // namespace spinal
