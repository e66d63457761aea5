#include "spinal/codec.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "spinal/error.hpp"

namespace spinal {
namespace {

constexpr std::uint64_t kSpineTag = 0x5350494e45000001ULL;   // "SPINE"
constexpr std::uint64_t kSymbolTag = 0x53594d424f4c0002ULL;  // "SYMBOL"

std::uint64_t low_mask(unsigned bits) {
    return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
}

void check_shape(const ObservationGrid& obs, const CodeParams& p) {
    if (obs.rows() != p.segments() || obs.cols() != p.L())
        throw ShapeError("observation grid is " + std::to_string(obs.rows()) + "x" +
                         std::to_string(obs.cols()) + ", expected " +
                         std::to_string(p.segments()) + "x" + std::to_string(p.L()));
    auto finite = [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
    for (std::size_t i = 0; i < obs.rows(); ++i)
        for (const auto& o : obs.row(i))
            if (!finite(o.y) || !finite(o.h)) throw ParameterError("observation has a non-finite component");
}

// Depth-first search over the segment tree. A child is only kept when its
// partial cost is strictly below the best complete cost seen so far; partial
// costs never decrease along a path, so this keeps the exact argmin and,
// because children are visited in increasing word order, the smallest message
// among equal-cost leaves.
class TreeSearch {
public:
    TreeSearch(const CodeParams& p, const Constellation& psi, const ObservationGrid& obs)
        : p_(p), psi_(psi), obs_(obs), depth_(p.segments()),
          path_(depth_), seg_costs_(depth_), best_path_(depth_), best_seg_costs_(depth_) {}

    DecodeResult run() {
        descend(0, SpineValue{0}, 0.0);
        DecodeResult r;
        r.message = Message::from_segments(best_path_, p_.k());
        r.cost = best_;
        r.segment_costs = best_seg_costs_;
        return r;
    }

private:
    void descend(std::size_t depth, SpineValue parent, double partial) {
        const std::uint64_t branches = std::uint64_t{1} << p_.k();
        const auto row = obs_.row(depth);
        for (std::uint64_t m = 0; m < branches; ++m) {
            const SpineValue s = hash_step(parent, m, p_);
            double seg = 0.0;
            for (unsigned j = 0; j < p_.L(); ++j) {
                const cplx x = psi_[rng_symbol(s, j + 1, p_)];
                seg += std::norm(row[j].y - row[j].h * x);
            }
            const double cost = partial + seg;
            if (!(cost < best_)) continue;
            path_[depth] = m;
            seg_costs_[depth] = seg;
            if (depth + 1 == depth_) {
                best_ = cost;
                best_path_ = path_;
                best_seg_costs_ = seg_costs_;
            } else {
                descend(depth + 1, s, cost);
            }
        }
    }

    const CodeParams& p_;
    const Constellation& psi_;
    const ObservationGrid& obs_;
    std::size_t depth_;
    double best_ = std::numeric_limits<double>::infinity();
    std::vector<std::uint64_t> path_;
    std::vector<double> seg_costs_;
    std::vector<std::uint64_t> best_path_;
    std::vector<double> best_seg_costs_;
};

}  // namespace

CodeParams::CodeParams(const Fields& f) : f_(f) {
    if (f.k == 0 || f.k > 64) throw ParameterError("k must be in [1, 64]");
    if (f.n == 0 || f.n % f.k != 0) throw ParameterError("k must divide n (n/k >= 1)");
    if (f.c % 2 != 0 || f.c < 2 || f.c > 16)
        throw UnsupportedModulation("c must be even and in [2, 16], got " + std::to_string(f.c));
    if (f.v < f.k || f.v > 64) throw ParameterError("v must satisfy k <= v <= 64");
    if (f.L == 0) throw ParameterError("L must be >= 1");
    if (!(f.d_min > 0.0) || !std::isfinite(f.d_min)) throw ParameterError("d_min must be > 0");
}

CodeParams CodeParams::with_passes(unsigned L) const {
    Fields f = f_;
    f.L = L;
    return CodeParams(f);
}

Message::Message(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto b : bits_)
        if (b > 1) throw InvalidMessage("message bits must be 0 or 1");
}

Message Message::from_segments(std::span<const std::uint64_t> words, unsigned k) {
    std::vector<std::uint8_t> bits;
    bits.reserve(words.size() * k);
    for (std::uint64_t w : words) {
        if (k < 64 && (w >> k) != 0) throw InvalidMessage("segment word wider than k bits");
        for (unsigned t = 0; t < k; ++t) bits.push_back(static_cast<std::uint8_t>((w >> (k - 1 - t)) & 1));
    }
    return Message(std::move(bits));
}

Message Message::from_value(std::uint64_t value, unsigned n) {
    if (n == 0 || n > 64) throw InvalidMessage("from_value needs 1 <= n <= 64");
    const std::uint64_t w = value & low_mask(n);
    return from_segments(std::span(&w, 1), n);
}

std::uint64_t Message::segment(std::size_t i, unsigned k) const {
    if ((i + 1) * k > bits_.size()) throw InvalidMessage("segment index out of range");
    std::uint64_t w = 0;
    for (unsigned t = 0; t < k; ++t) w = (w << 1) | bits_[i * k + t];
    return w;
}

std::vector<std::uint64_t> Message::segments(unsigned k) const {
    std::vector<std::uint64_t> out(bits_.size() / k);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = segment(i, k);
    return out;
}

std::string Message::to_string() const {
    std::string s;
    s.reserve(bits_.size());
    for (auto b : bits_) s.push_back(b ? '1' : '0');
    return s;
}

SpineValue hash_step(SpineValue s, std::uint64_t m, const CodeParams& params) {
    if (params.k() < 64 && (m >> params.k()) != 0) throw ParameterError("segment word exceeds 2^k");
    const std::uint64_t h = keyed_hash(params.hash_id(), s.value, m, kSpineTag);
    return SpineValue{fold_to_bits(h, params.v())};
}

std::vector<SpineValue> spine_chain(const Message& msg, const CodeParams& params) {
    if (msg.size() != params.n())
        throw InvalidMessage("message has " + std::to_string(msg.size()) + " bits, expected " +
                             std::to_string(params.n()));
    std::vector<SpineValue> chain;
    chain.reserve(params.segments());
    SpineValue s{0};
    for (std::size_t i = 0; i < params.segments(); ++i) {
        s = hash_step(s, msg.segment(i, params.k()), params);
        chain.push_back(s);
    }
    return chain;
}

std::uint32_t rng_symbol(SpineValue s, unsigned pass, const CodeParams& params) {
    const std::uint64_t h = keyed_hash(params.hash_id(), s.value, pass, kSymbolTag);
    return static_cast<std::uint32_t>(h & low_mask(params.c()));
}

Constellation build_constellation(unsigned c, double d_min) {
    if (c % 2 != 0 || c < 2 || c > 16)
        throw UnsupportedModulation("square QAM needs even c in [2, 16], got " + std::to_string(c));
    if (!(d_min > 0.0) || !std::isfinite(d_min)) throw ParameterError("d_min must be > 0");
    Constellation psi;
    psi.c_ = c;
    psi.d_min_ = d_min;
    psi.side_ = 1u << (c / 2);
    const double centre = (psi.side_ - 1) / 2.0;
    psi.points_.reserve(std::size_t{psi.side_} * psi.side_);
    for (unsigned row = 0; row < psi.side_; ++row)
        for (unsigned col = 0; col < psi.side_; ++col)
            psi.points_.emplace_back((col - centre) * d_min, (row - centre) * d_min);
    return psi;
}

SpinalCode::SpinalCode(CodeParams params)
    : params_(params), psi_(build_constellation(params.c(), params.d_min())) {}

CodedSymbolGrid SpinalCode::encode(const Message& msg) const {
    const auto chain = spine_chain(msg, params_);
    CodedSymbolGrid grid(params_.segments(), params_.L());
    for (std::size_t i = 0; i < chain.size(); ++i)
        for (unsigned j = 0; j < params_.L(); ++j) grid(i, j) = psi_[rng_symbol(chain[i], j + 1, params_)];
    return grid;
}

DecodeResult SpinalCode::decode(const ObservationGrid& obs, const DecodeOptions& opts) const {
    if (params_.n() > opts.max_message_bits)
        throw BudgetExceeded("exhaustive decoding of n=" + std::to_string(params_.n()) +
                             " bits exceeds the cap of " + std::to_string(opts.max_message_bits));
    check_shape(obs, params_);
    return TreeSearch(params_, psi_, obs).run();
}

CodedSymbolGrid encode(const Message& msg, const CodeParams& params) {
    return SpinalCode(params).encode(msg);
}

Message ml_decode(const ObservationGrid& obs, const CodeParams& params, const DecodeOptions& opts) {
    return ml_decode_traced(obs, params, opts).message;
}

DecodeResult ml_decode_traced(const ObservationGrid& obs, const CodeParams& params,
                              const DecodeOptions& opts) {
    return SpinalCode(params).decode(obs, opts);
}

}  // namespace spinal
