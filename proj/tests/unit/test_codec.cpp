#include <doctest.h>

#include <bit>
#include <cmath>
#include <limits>
#include <random>

#include "spinal/channel.hpp"
#include "spinal/codec.hpp"
#include "spinal/error.hpp"

using namespace spinal;

namespace {

CodeParams params(unsigned n, unsigned k, unsigned c, unsigned L, HashId hash = kDefaultHash) {
    return CodeParams({.n = n, .k = k, .c = c, .L = L, .v = 32, .d_min = 2.0, .hash = hash});
}

Message random_msg(unsigned n, std::mt19937_64& rng) {
    std::vector<std::uint8_t> bits(n);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1);
    return Message(bits);
}

// Flat enumeration over all 2^n messages, accumulating segment by segment in
// the same order as the decoder so equal instances give bit-equal costs.
Message flat_argmin(const ObservationGrid& obs, const CodeParams& p) {
    double best = std::numeric_limits<double>::infinity();
    Message best_msg;
    for (std::uint64_t value = 0; value < (std::uint64_t{1} << p.n()); ++value) {
        const Message m = Message::from_value(value, p.n());
        const CodedSymbolGrid x = encode(m, p);
        double total = 0.0;
        for (std::size_t i = 0; i < x.rows(); ++i) {
            double seg = 0.0;
            for (std::size_t j = 0; j < x.cols(); ++j) seg += std::norm(obs(i, j).y - obs(i, j).h * x(i, j));
            total += seg;
        }
        if (total < best) {
            best = total;
            best_msg = m;
        }
    }
    return best_msg;
}

ObservationGrid noisy(const CodedSymbolGrid& x, const ChannelModel& model, double sigma2, std::mt19937_64& rng) {
    return transmit(x, model, NoiseSpec{sigma2, 0.0}, rng);
}

}  // namespace

TEST_CASE("CodeParams rejects invalid tuples") {
    CHECK_NOTHROW(params(8, 4, 4, 1));
    CHECK_THROWS_AS(params(8, 4, 3, 1), UnsupportedModulation);
    CHECK_THROWS_AS(params(8, 4, 18, 1), UnsupportedModulation);
    CHECK_THROWS_AS(params(9, 4, 4, 1), ParameterError);
    CHECK_THROWS_AS(params(8, 4, 4, 0), ParameterError);
    CHECK_THROWS_AS(CodeParams({.n = 8, .k = 8, .c = 4, .L = 1, .v = 4}), ParameterError);
    CHECK_THROWS_AS(CodeParams({.n = 8, .k = 4, .c = 4, .L = 1, .v = 32, .d_min = 0.0}), ParameterError);
    CHECK(params(8, 4, 4, 1).v() == 32);
    CHECK(params(12, 4, 4, 2).segments() == 3);
}

TEST_CASE("Message segments and ordering") {
    const Message m(std::vector<std::uint8_t>{1, 0, 1, 0, 1, 1, 0, 0});
    CHECK(m.segment(0, 4) == 0xA);
    CHECK(m.segment(1, 4) == 0xC);
    CHECK(m.segments(2) == std::vector<std::uint64_t>{2, 2, 3, 0});
    CHECK(Message::from_value(0xAC, 8) == m);
    const std::vector<std::uint64_t> words{0xA, 0xC};
    CHECK(Message::from_segments(words, 4) == m);
    CHECK(m.to_string() == "10101100");
    // lexicographic bit order == numeric order of the MSB-first value
    CHECK(Message::from_value(3, 8) < Message::from_value(4, 8));
    CHECK_THROWS_AS(Message(std::vector<std::uint8_t>{0, 2}), InvalidMessage);
}

TEST_CASE("hash_step is deterministic and pinned") {
    const auto p = params(8, 4, 4, 1);
    CHECK(hash_step(SpineValue{7}, 3, p) == hash_step(SpineValue{7}, 3, p));
    // reference values computed by an independent Python port of the hashes
    CHECK(hash_step(SpineValue{0}, 0, p).value == 0xb429c7f9ULL);
    CHECK(hash_step(SpineValue{0}, 0, params(8, 4, 4, 1, HashId::murmur3)).value == 0xf68badccULL);
    CHECK(hash_step(SpineValue{0}, 0, p).value != 0);
    CHECK_THROWS_AS(hash_step(SpineValue{0}, 16, p), ParameterError);
}

TEST_CASE("hash_step avalanche on the low message bit") {
    for (HashId id : registered_hashes()) {
        const auto p = params(8, 4, 4, 1, id);
        std::mt19937_64 rng(2024);
        double total = 0.0;
        const int pairs = 10000;
        for (int t = 0; t < pairs; ++t) {
            const SpineValue s{rng() & 0xffffffffULL};
            const std::uint64_t m = rng() & 0xf;
            total += std::popcount(hash_step(s, m, p).value ^ hash_step(s, m ^ 1, p).value);
        }
        const double mean = total / pairs;
        CAPTURE(hash_name(id));
        CHECK(mean >= 0.45 * 32);
        CHECK(mean <= 0.55 * 32);
    }
}

TEST_CASE("spine_chain prefix and causality") {
    const auto p = params(16, 4, 4, 1);
    std::mt19937_64 rng(11);
    const Message a = random_msg(16, rng);
    auto bits = a.bits();
    bits[9] ^= 1;  // segment 3 (1-based)
    const Message b(bits);
    const auto ca = spine_chain(a, p);
    const auto cb = spine_chain(b, p);
    REQUIRE(ca.size() == 4);
    CHECK(ca[0] == cb[0]);
    CHECK(ca[1] == cb[1]);
    CHECK(ca[2] != cb[2]);

    bits = a.bits();
    bits[15] ^= 1;  // last segment only
    const auto cc = spine_chain(Message(bits), p);
    for (int i = 0; i < 3; ++i) CHECK(ca[i] == cc[i]);
    CHECK(ca[3] != cc[3]);

    CHECK(spine_chain(Message::from_value(0x5A, 8), params(8, 4, 4, 1)).size() == 2);
    CHECK_THROWS_AS(spine_chain(Message::from_value(0x5A, 8), p), InvalidMessage);
    CHECK(spine_chain(a, p)[0] == hash_step(SpineValue{0}, a.segment(0, 4), p));
}

TEST_CASE("rng_symbol uniformity and pass independence") {
    const auto p = params(8, 4, 4, 1);
    CHECK(rng_symbol(SpineValue{99}, 3, p) == rng_symbol(SpineValue{99}, 3, p));

    std::mt19937_64 rng(5);
    SUBCASE("chi-square over 1e5 draws") {
        std::vector<double> counts(16, 0.0);
        const int draws = 100000;
        for (int t = 0; t < draws; ++t) counts[rng_symbol(SpineValue{rng() & 0xffffffffULL}, 1, p)] += 1;
        double chi2 = 0.0;
        const double expected = draws / 16.0;
        for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
        CHECK(chi2 < 30.578);  // chi-square(15) upper 1% point
    }
    SUBCASE("frequencies over 1e6 spines within 1% of 1/16") {
        std::vector<double> counts(16, 0.0);
        const int draws = 1000000;
        for (int t = 0; t < draws; ++t) counts[rng_symbol(SpineValue{rng() & 0xffffffffULL}, 1, p)] += 1;
        for (double c : counts) CHECK(std::abs(c / draws - 1.0 / 16) <= 0.01 / 16);
    }
    SUBCASE("pass 1 and pass 2 are uncorrelated") {
        const Constellation psi = build_constellation(4, 2.0);
        const int draws = 1000000;
        double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
        for (int t = 0; t < draws; ++t) {
            const SpineValue s{rng() & 0xffffffffULL};
            const double a = psi[rng_symbol(s, 1, p)].real();
            const double b = psi[rng_symbol(s, 2, p)].real();
            sx += a; sy += b; sxx += a * a; syy += b * b; sxy += a * b;
        }
        const double cov = sxy / draws - sx / draws * sy / draws;
        const double corr = cov / std::sqrt((sxx / draws - sx * sx / draws / draws) * (syy / draws - sy * sy / draws / draws));
        CHECK(std::abs(corr) < 0.01);
    }
}

TEST_CASE("build_constellation geometry") {
    const auto qpsk = build_constellation(2, 2.0);
    REQUIRE(qpsk.size() == 4);
    CHECK(qpsk[0] == cplx(-1, -1));
    CHECK(qpsk[1] == cplx(1, -1));
    CHECK(qpsk[2] == cplx(-1, 1));
    CHECK(qpsk[3] == cplx(1, 1));

    const auto q16 = build_constellation(4, 2.0);
    REQUIRE(q16.size() == 16);
    for (const auto& z : q16.points()) {
        CHECK((std::abs(z.real()) == 1.0 || std::abs(z.real()) == 3.0));
        CHECK((std::abs(z.imag()) == 1.0 || std::abs(z.imag()) == 3.0));
    }

    for (unsigned c = 2; c <= 16; c += 2) {
        const auto psi = build_constellation(c, 0.7);
        CHECK(psi.size() == (std::size_t{1} << c));
        cplx mean = 0;
        for (const auto& z : psi.points()) mean += z;
        CHECK(std::abs(mean) == doctest::Approx(0.0));
        if (c <= 8) {
            double dmin = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < psi.size(); ++i)
                for (std::size_t j = i + 1; j < psi.size(); ++j) dmin = std::min(dmin, std::abs(psi[i] - psi[j]));
            CHECK(dmin == doctest::Approx(0.7).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(build_constellation(3, 1.0), UnsupportedModulation);
    CHECK_THROWS_AS(build_constellation(4, -1.0), ParameterError);
}

TEST_CASE("encode shape, determinism and prefix property") {
    const auto p = params(12, 4, 4, 3);
    const Message a = Message::from_value(0xABC, 12);
    const Message b = Message::from_value(0xAB3, 12);
    const auto ga = encode(a, p);
    CHECK(ga == encode(a, p));
    CHECK(ga.rows() == 3);
    CHECK(ga.cols() == 3);
    const auto gb = encode(b, p);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(ga(i, j) == gb(i, j));

    const auto psi = build_constellation(4, 2.0);
    const auto chain = spine_chain(a, p);
    for (std::size_t i = 0; i < 3; ++i)
        for (unsigned j = 0; j < 3; ++j) CHECK(ga(i, j) == psi[rng_symbol(chain[i], j + 1, p)]);
}

TEST_CASE("ml_decode recovers the message without noise") {
    const auto p = params(8, 4, 4, 2);
    std::mt19937_64 rng(3);
    int checked = 0;
    for (int t = 0; t < 40; ++t) {
        const Message m = random_msg(8, rng);
        const auto x = encode(m, p);
        ObservationGrid obs(x.rows(), x.cols());
        for (std::size_t i = 0; i < x.rows(); ++i)
            for (std::size_t j = 0; j < x.cols(); ++j) obs(i, j) = Observation{x(i, j), {1, 0}};
        // skip instances where another message has the same codeword
        bool collides = false;
        for (std::uint64_t v = 0; v < 256 && !collides; ++v) {
            const Message other = Message::from_value(v, 8);
            collides = other != m && encode(other, p) == x;
        }
        if (collides) continue;
        ++checked;
        const auto r = ml_decode_traced(obs, p);
        CHECK(r.message == m);
        CHECK(r.cost == 0.0);
    }
    CHECK(checked > 30);
}

TEST_CASE("tree search equals flat enumeration") {
    SUBCASE("n=8 k=2 c=4 L=2, 100 noisy AWGN instances") {
        const auto p = params(8, 2, 4, 2);
        std::mt19937_64 rng(17);
        for (int t = 0; t < 100; ++t) {
            const Message m = random_msg(8, rng);
            const auto obs = noisy(encode(m, p), ChannelModel::awgn(), 2.0, rng);
            CHECK(ml_decode(obs, p) == flat_argmin(obs, p));
        }
    }
    SUBCASE("random small codes up to n=12 over every channel") {
        std::mt19937_64 rng(23);
        const std::vector<ChannelModel> models{ChannelModel::awgn(), ChannelModel::rayleigh(),
                                               ChannelModel::nakagami(0.7)};
        const unsigned shapes[][3] = {{4, 1, 2}, {6, 3, 2}, {8, 4, 4}, {9, 3, 2}, {10, 5, 2}, {12, 4, 2}, {12, 3, 4}};
        for (int t = 0; t < 28; ++t) {
            const auto& s = shapes[t % 7];
            const auto p = params(s[0], s[1], s[2], 1 + static_cast<unsigned>(rng() % 2));
            const Message m = random_msg(p.n(), rng);
            const auto obs = noisy(encode(m, p), models[t % 3], 0.5 + (rng() % 4), rng);
            CHECK(ml_decode(obs, p) == flat_argmin(obs, p));
        }
    }
}

TEST_CASE("ties resolve to the lexicographically smallest message") {
    SUBCASE("no information: every message costs the same") {
        const auto p = params(8, 4, 4, 1);
        ObservationGrid obs(2, 1);
        for (std::size_t i = 0; i < 2; ++i) obs(i, 0) = Observation{{0.3, -0.2}, {0.0, 0.0}};
        CHECK(ml_decode(obs, p) == Message::from_value(0, 8));
    }
    SUBCASE("colliding codewords") {
        // c=2, L=1: collisions are common; decode the larger of a colliding pair
        const auto p = params(6, 2, 2, 1);
        std::vector<CodedSymbolGrid> words;
        for (std::uint64_t v = 0; v < 64; ++v) words.push_back(encode(Message::from_value(v, 6), p));
        int found = 0;
        for (std::uint64_t hi = 0; hi < 64; ++hi) {
            for (std::uint64_t lo = 0; lo < hi; ++lo) {
                if (!(words[lo] == words[hi])) continue;
                ObservationGrid obs(3, 1);
                for (std::size_t i = 0; i < 3; ++i) obs(i, 0) = Observation{words[hi](i, 0), {1, 0}};
                // the smallest message sharing this codeword
                std::uint64_t smallest = lo;
                for (std::uint64_t w = 0; w < lo; ++w)
                    if (words[w] == words[hi]) { smallest = w; break; }
                CHECK(ml_decode(obs, p) == Message::from_value(smallest, 6));
                ++found;
                break;
            }
        }
        CHECK(found > 0);
    }
}

TEST_CASE("decoder metric invariances") {
    const auto p = params(8, 2, 4, 2);
    std::mt19937_64 rng(29);
    for (int t = 0; t < 20; ++t) {
        const Message m = random_msg(8, rng);
        const auto obs = noisy(encode(m, p), ChannelModel::rayleigh(), 1.0, rng);
        const auto r = ml_decode_traced(obs, p);
        double sum = 0.0;
        for (double s : r.segment_costs) sum += s;
        CHECK(sum == r.cost);

        ObservationGrid scaled = obs;
        const cplx a(0.8, -1.7);
        for (std::size_t i = 0; i < obs.rows(); ++i)
            for (std::size_t j = 0; j < obs.cols(); ++j) scaled(i, j) = Observation{a * obs(i, j).y, a * obs(i, j).h};
        CHECK(ml_decode(scaled, p) == r.message);
    }
}

TEST_CASE("decoder guards") {
    const auto big = params(28, 4, 4, 1);
    ObservationGrid obs(7, 1);
    CHECK_THROWS_AS(ml_decode(obs, big), BudgetExceeded);
    CHECK_NOTHROW(ml_decode(ObservationGrid(2, 1), params(8, 4, 4, 1), DecodeOptions{8}));
    CHECK_THROWS_AS(ml_decode(ObservationGrid(2, 1), params(8, 4, 4, 1), DecodeOptions{7}), BudgetExceeded);
    CHECK_THROWS_AS(ml_decode(ObservationGrid(3, 1), params(8, 4, 4, 1)), ShapeError);
    ObservationGrid bad(2, 1);
    bad(0, 0).y = cplx(std::nan(""), 0.0);
    CHECK_THROWS_AS(ml_decode(bad, params(8, 4, 4, 1)), ParameterError);
}
