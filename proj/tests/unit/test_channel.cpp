#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "spinal/channel.hpp"
#include "spinal/error.hpp"

using namespace spinal;

namespace {

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double t = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= t) ++i;
        while (j < b.size() && b[j] <= t) ++j;
        d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
    }
    return d;
}

}  // namespace

TEST_CASE("SNR and noise variance conversions") {
    const auto ns = sigma_from_snr(10.0 * std::log10(2.0), 2, 2.0);
    CHECK(ns.sigma2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::pow(10.0, snr_from_sigma(1.0, 2, 2.0) / 10.0) == doctest::Approx(2.0).epsilon(1e-12));

    for (unsigned c : {2u, 4u, 6u, 8u, 16u}) {
        for (double db : {-10.0, 0.0, 3.5, 20.0, 47.0}) {
            for (double d : {0.5, 2.0}) {
                const double s2 = sigma_from_snr(db, c, d).sigma2;
                const double back = snr_from_sigma(s2, c, d);
                CHECK(std::abs(back - db) <= 1e-12 * std::max(1.0, std::abs(db)));
            }
        }
    }
    CHECK(sigma_from_snr(std::numeric_limits<double>::infinity(), 4, 2.0).sigma2 == 0.0);
    CHECK_THROWS_AS(sigma_from_snr(10.0, 3, 2.0), UnsupportedModulation);
}

TEST_CASE("channel model construction") {
    CHECK(describe(ChannelModel::awgn()) == "awgn");
    CHECK(describe(ChannelModel::rayleigh()) == "rayleigh");
    CHECK(describe(ChannelModel::nakagami(1.5)) == "nakagami(m=1.5)");
    CHECK_NOTHROW(ChannelModel::nakagami(0.5));
    CHECK_THROWS_AS(ChannelModel::nakagami(0.4), ParameterError);
}

TEST_CASE("fading statistics") {
    RngStream rng(41);
    const int draws = 1000000;
    SUBCASE("AWGN gain is exactly one") {
        for (int t = 0; t < 1000; ++t) CHECK(sample_fading(ChannelModel::awgn(), rng) == cplx(1.0, 0.0));
    }
    SUBCASE("unit mean-square gain and uniform phase") {
        for (const auto& model : {ChannelModel::rayleigh(), ChannelModel::nakagami(0.6), ChannelModel::nakagami(3.0)}) {
            double power = 0.0;
            cplx mean = 0.0;
            for (int t = 0; t < draws; ++t) {
                const cplx h = sample_fading(model, rng);
                power += std::norm(h);
                mean += h;
            }
            CAPTURE(describe(model));
            CHECK(std::abs(power / draws - 1.0) <= 0.01);
            CHECK(std::abs(mean / double(draws)) < 0.01);
        }
    }
    SUBCASE("Nakagami m=1 matches Rayleigh") {
        std::vector<double> a, b;
        for (int t = 0; t < 100000; ++t) a.push_back(std::abs(sample_fading(ChannelModel::nakagami(1.0), rng)));
        for (int t = 0; t < 100000; ++t) b.push_back(std::abs(sample_fading(ChannelModel::rayleigh(), rng)));
        CHECK(ks_two_sample(a, b) < 0.01);
    }
    SUBCASE("Nakagami power has variance 1/m") {
        const double m = 2.5;
        double s = 0, ss = 0;
        for (int t = 0; t < draws; ++t) {
            const double p = std::norm(sample_fading(ChannelModel::nakagami(m), rng));
            s += p;
            ss += p * p;
        }
        const double var = ss / draws - (s / draws) * (s / draws);
        CHECK(var == doctest::Approx(1.0 / m).epsilon(0.02));
    }
}

TEST_CASE("transmit noise") {
    RngStream rng(43);
    SUBCASE("noiseless AWGN passes symbols through") {
        CodedSymbolGrid x(3, 2);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 2; ++j) x(i, j) = cplx(double(i), -double(j));
        const auto obs = transmit(x, ChannelModel::awgn(), NoiseSpec{0.0, 0.0}, rng);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 2; ++j) {
                CHECK(obs(i, j).y == x(i, j));
                CHECK(obs(i, j).h == cplx(1.0, 0.0));
            }
    }
    SUBCASE("variance, circularity and independence") {
        const double sigma2 = 2.0;
        const std::size_t rows = 1000, cols = 1000;
        const CodedSymbolGrid zero(rows, cols);
        const auto obs = transmit(zero, ChannelModel::awgn(), NoiseSpec{sigma2, 0.0}, rng);
        double total = 0, re2 = 0, im2 = 0, reim = 0, lag = 0;
        cplx prev = 0.0;
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) {
                const cplx z = obs(i, j).y;
                total += std::norm(z);
                re2 += z.real() * z.real();
                im2 += z.imag() * z.imag();
                reim += z.real() * z.imag();
                lag += z.real() * prev.real();
                prev = z;
            }
        const double count = double(rows * cols);
        CHECK(std::abs(total / count / sigma2 - 1.0) <= 0.01);
        CHECK(std::abs(re2 / count / (sigma2 / 2) - 1.0) <= 0.01);
        CHECK(std::abs(im2 / count / (sigma2 / 2) - 1.0) <= 0.01);
        CHECK(std::abs(reim / count) / (sigma2 / 2) < 0.01);
        CHECK(std::abs(lag / count) / (sigma2 / 2) < 0.01);
    }
    SUBCASE("same stream, same observations") {
        CodedSymbolGrid x(2, 2);
        RngStream a(7), b(7);
        CHECK(transmit(x, ChannelModel::rayleigh(), NoiseSpec{0.3, 0.0}, a) ==
              transmit(x, ChannelModel::rayleigh(), NoiseSpec{0.3, 0.0}, b));
    }
}
