#pragma once

// Monte Carlo BLER estimation.
//
// Every trial draws its message, fading and noise from its own stream, seeded
// by hashing (master_seed, trial_index). Trials run in fixed-size batches and
// the stop rule is checked only between batches, so the (errors, trials) pair
// does not depend on the number of worker threads.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "spinal/analysis.hpp"
#include "spinal/channel.hpp"
#include "spinal/codec.hpp"

namespace spinal {

struct StopRule {
    std::uint64_t max_trials = 1'000'000;
    /// Stop at the first batch boundary with at least this many errors.
    std::optional<std::uint64_t> target_errors = 200;

    static StopRule fixed(std::uint64_t trials) { return {trials, std::nullopt}; }
    static StopRule until_errors(std::uint64_t errors, std::uint64_t cap) { return {cap, errors}; }

    void validate() const;
};

struct TrialPlan {
    CodeParams params;
    ChannelModel model;
    double gamma_db = 0.0;
    StopRule stop;
    std::uint64_t master_seed = 1;
    DecodeOptions decode;
};

struct ExecutionOptions {
    /// 0 picks std::thread::hardware_concurrency().
    unsigned threads = 0;
    std::uint64_t batch_size = 1024;
};

struct BlerEstimate {
    std::uint64_t errors = 0;
    std::uint64_t trials = 0;
    double p_hat = 0.0;
    double ci_low = 0.0;
    double ci_high = 1.0;
};

inline constexpr double kZ95 = 1.959963984540054;

/// Wilson score interval.
BlerEstimate wilson_estimate(std::uint64_t errors, std::uint64_t trials, double z = kZ95);

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);
RngStream trial_stream(std::uint64_t master_seed, std::uint64_t trial_index);

/// Uniform n-bit message.
Message random_message(unsigned n, RngStream& rng);

/// Encode, transmit, decode one block; true on block error.
bool run_trial(const TrialPlan& plan, std::uint64_t trial_index);

/// run_trial with the constellation and noise level prepared once.
class TrialRunner {
public:
    explicit TrialRunner(TrialPlan plan);
    bool operator()(std::uint64_t trial_index) const;
    const TrialPlan& plan() const noexcept { return plan_; }

private:
    TrialPlan plan_;
    SpinalCode code_;
    NoiseSpec noise_;
};

using TrialFn = std::function<bool(std::uint64_t trial_index)>;

/// Runs `trial` over indices 0, 1, 2, ... until the stop rule fires.
/// Exceptions thrown by a trial are rethrown on the calling thread.
BlerEstimate estimate_bler(const StopRule& stop, const TrialFn& trial, const ExecutionOptions& exec = {});
BlerEstimate estimate_bler(const TrialPlan& plan, const ExecutionOptions& exec = {});

struct SweepConfig {
    CodeParams params;
    ChannelModel model;
    std::vector<double> gamma_grid;  // dB, strictly ascending
    StopRule stop;
    std::uint64_t master_seed = 1;
    QuadratureScheme scheme = quadrature_uniform();
    double x = kDefaultThresholdPrecision;
    DecodeOptions decode;
};

struct SweepRecord {
    double gamma_db = 0.0;
    double sigma2 = 0.0;
    BlerEstimate bler;
    double bound = 1.0;
    double floor = 1.0;
    double threshold_db = 0.0;
    std::uint64_t master_seed = 0;
    HashId hash = kDefaultHash;
};

/// Grid point i is simulated with master seed derive_seed(master_seed, i).
std::vector<SweepRecord> sweep(const SweepConfig& config, const ExecutionOptions& exec = {});

unsigned default_thread_count() noexcept;

}  // namespace spinal
