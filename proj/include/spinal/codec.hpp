#pragma once

// Spinal encoder and exhaustive ML decoder.
//
// Message bits are numbered 0..n-1. Segment i (0-based) covers bits
// [i*k, (i+1)*k) and is read MSB-first, so comparing segment words in order is
// the same as comparing messages in lexicographic bit order. Pass numbers are
// 1-based, matching the usual "first pass, second pass" wording.

#include <compare>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spinal/hash.hpp"

namespace spinal {

using cplx = std::complex<double>;

class CodeParams {
public:
    struct Fields {
        unsigned n = 0;
        unsigned k = 0;
        unsigned c = 0;
        unsigned L = 1;
        unsigned v = 32;
        double d_min = 2.0;
        HashId hash = kDefaultHash;
        friend bool operator==(const Fields&, const Fields&) = default;
    };

    /// Throws ParameterError (UnsupportedModulation for odd or out-of-range c).
    explicit CodeParams(const Fields& f);

    unsigned n() const noexcept { return f_.n; }
    unsigned k() const noexcept { return f_.k; }
    unsigned c() const noexcept { return f_.c; }
    unsigned L() const noexcept { return f_.L; }
    unsigned v() const noexcept { return f_.v; }
    double d_min() const noexcept { return f_.d_min; }
    HashId hash_id() const noexcept { return f_.hash; }
    unsigned segments() const noexcept { return f_.n / f_.k; }
    const Fields& fields() const noexcept { return f_; }

    CodeParams with_passes(unsigned L) const;

    friend bool operator==(const CodeParams&, const CodeParams&) = default;

private:
    Fields f_;
};

class Message {
public:
    Message() = default;
    /// Each entry must be 0 or 1.
    explicit Message(std::vector<std::uint8_t> bits);

    /// Concatenates k-bit words, each MSB-first.
    static Message from_segments(std::span<const std::uint64_t> words, unsigned k);
    /// n-bit message whose bit 0 is the MSB of `value`. n <= 64.
    static Message from_value(std::uint64_t value, unsigned n);

    std::size_t size() const noexcept { return bits_.size(); }
    bool bit(std::size_t i) const { return bits_.at(i) != 0; }
    const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

    /// Segment i (0-based) as a k-bit word.
    std::uint64_t segment(std::size_t i, unsigned k) const;
    std::vector<std::uint64_t> segments(unsigned k) const;

    /// Bits as '0'/'1' characters.
    std::string to_string() const;

    friend auto operator<=>(const Message&, const Message&) = default;

private:
    std::vector<std::uint8_t> bits_;
};

struct SpineValue {
    std::uint64_t value = 0;
    friend auto operator<=>(const SpineValue&, const SpineValue&) = default;
};

/// Square 2^c-QAM grid centred on the origin with adjacent spacing d_min.
/// Index q maps row-major: row = q / side, col = q % side, and
/// point = ((col - (side-1)/2) * d_min, (row - (side-1)/2) * d_min).
class Constellation {
public:
    unsigned c() const noexcept { return c_; }
    double d_min() const noexcept { return d_min_; }
    unsigned side() const noexcept { return side_; }
    std::size_t size() const noexcept { return points_.size(); }
    const std::vector<cplx>& points() const noexcept { return points_; }
    const cplx& operator[](std::size_t q) const noexcept { return points_[q]; }

private:
    friend Constellation build_constellation(unsigned c, double d_min);
    unsigned c_ = 0;
    unsigned side_ = 0;
    double d_min_ = 0.0;
    std::vector<cplx> points_;
};

/// Dense row-major matrix indexed [segment][pass], both 0-based.
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    T& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }
    std::span<const T> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using CodedSymbolGrid = Grid<cplx>;

/// One received sample and the fading coefficient the receiver knows.
struct Observation {
    cplx y;
    cplx h{1.0, 0.0};
    friend bool operator==(const Observation&, const Observation&) = default;
};

using ObservationGrid = Grid<Observation>;

struct DecodeOptions {
    /// Largest n the exhaustive decoder will enumerate.
    unsigned max_message_bits = 24;
};

struct DecodeResult {
    Message message;
    double cost = 0.0;
    /// Partial metric of each segment along the winning path.
    std::vector<double> segment_costs;
};

SpineValue hash_step(SpineValue s, std::uint64_t m, const CodeParams& params);
std::vector<SpineValue> spine_chain(const Message& msg, const CodeParams& params);
/// c-bit symbol index for pass `pass` (>= 1) of spine `s`.
std::uint32_t rng_symbol(SpineValue s, unsigned pass, const CodeParams& params);
Constellation build_constellation(unsigned c, double d_min);
CodedSymbolGrid encode(const Message& msg, const CodeParams& params);

/// argmin over all 2^n messages of sum |y - h x(M')|^2. Ties go to the
/// lexicographically smallest message.
Message ml_decode(const ObservationGrid& obs, const CodeParams& params,
                  const DecodeOptions& opts = {});
DecodeResult ml_decode_traced(const ObservationGrid& obs, const CodeParams& params,
                              const DecodeOptions& opts = {});

/// Params plus a prebuilt constellation, for callers that encode and decode
/// many blocks with one code.
class SpinalCode {
public:
    explicit SpinalCode(CodeParams params);

    const CodeParams& params() const noexcept { return params_; }
    const Constellation& constellation() const noexcept { return psi_; }

    CodedSymbolGrid encode(const Message& msg) const;
    DecodeResult decode(const ObservationGrid& obs, const DecodeOptions& opts = {}) const;

private:
    CodeParams params_;
    Constellation psi_;
};

}  // namespace spinal
