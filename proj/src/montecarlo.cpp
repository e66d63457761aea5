#include "spinal/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "spinal/error.hpp"

namespace spinal {
namespace {

constexpr std::uint64_t kStreamTag = 0x53545245414d0003ULL;  // "STREAM"

std::uint64_t run_batch(std::uint64_t begin, std::uint64_t end, const TrialFn& trial, unsigned threads) {
    const std::uint64_t count = end - begin;
    const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(threads, count));
    if (workers <= 1) {
        std::uint64_t errors = 0;
        for (std::uint64_t i = begin; i < end; ++i) errors += trial(i) ? 1 : 0;
        return errors;
    }

    std::atomic<std::uint64_t> next{begin};
    std::atomic<std::uint64_t> errors{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto work = [&] {
        std::uint64_t local = 0;
        try {
            for (std::uint64_t i = next.fetch_add(1); i < end; i = next.fetch_add(1))
                local += trial(i) ? 1 : 0;
        } catch (...) {
            std::lock_guard lock(failure_mu);
            if (!failure) failure = std::current_exception();
            next.store(end);
        }
        errors.fetch_add(local);
    };
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);
    return errors.load();
}

}  // namespace

void StopRule::validate() const {
    if (max_trials == 0) throw ParameterError("trial cap must be >= 1");
    if (target_errors && *target_errors == 0) throw ParameterError("target error count must be >= 1");
}

BlerEstimate wilson_estimate(std::uint64_t errors, std::uint64_t trials, double z) {
    if (trials == 0) throw ParameterError("Wilson interval needs at least one trial");
    BlerEstimate e;
    e.errors = errors;
    e.trials = trials;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(errors) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    e.p_hat = p;
    e.ci_low = errors == 0 ? 0.0 : std::clamp(centre - half, 0.0, p);
    e.ci_high = errors == trials ? 1.0 : std::clamp(centre + half, p, 1.0);
    return e;
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
    return keyed_hash(HashId::splitmix64, master_seed, index, kStreamTag);
}

RngStream trial_stream(std::uint64_t master_seed, std::uint64_t trial_index) {
    return RngStream(derive_seed(master_seed, trial_index));
}

Message random_message(unsigned n, RngStream& rng) {
    std::vector<std::uint8_t> bits(n);
    std::uint64_t word = 0;
    for (unsigned i = 0; i < n; ++i) {
        if (i % 64 == 0) word = rng();
        bits[i] = static_cast<std::uint8_t>((word >> (63 - i % 64)) & 1);
    }
    return Message(std::move(bits));
}

TrialRunner::TrialRunner(TrialPlan plan)
    : plan_(std::move(plan)),
      code_(plan_.params),
      noise_(sigma_from_snr(plan_.gamma_db, plan_.params.c(), plan_.params.d_min())) {
    plan_.model.validate();
}

bool TrialRunner::operator()(std::uint64_t trial_index) const {
    RngStream rng = trial_stream(plan_.master_seed, trial_index);
    const Message sent = random_message(plan_.params.n(), rng);
    const ObservationGrid obs = transmit(code_.encode(sent), plan_.model, noise_, rng);
    return code_.decode(obs, plan_.decode).message != sent;
}

bool run_trial(const TrialPlan& plan, std::uint64_t trial_index) {
    return TrialRunner(plan)(trial_index);
}

BlerEstimate estimate_bler(const StopRule& stop, const TrialFn& trial, const ExecutionOptions& exec) {
    stop.validate();
    if (exec.batch_size == 0) throw ParameterError("batch size must be >= 1");
    const unsigned threads = exec.threads == 0 ? default_thread_count() : exec.threads;
    std::uint64_t trials = 0;
    std::uint64_t errors = 0;
    while (trials < stop.max_trials) {
        const std::uint64_t end = std::min(stop.max_trials, trials + exec.batch_size);
        errors += run_batch(trials, end, trial, threads);
        trials = end;
        if (stop.target_errors && errors >= *stop.target_errors) break;
    }
    return wilson_estimate(errors, trials);
}

BlerEstimate estimate_bler(const TrialPlan& plan, const ExecutionOptions& exec) {
    const TrialRunner runner(plan);
    return estimate_bler(plan.stop, [&runner](std::uint64_t i) { return runner(i); }, exec);
}

std::vector<SweepRecord> sweep(const SweepConfig& config, const ExecutionOptions& exec) {
    if (config.gamma_grid.empty()) throw ParameterError("gamma_grid must not be empty");
    for (std::size_t i = 1; i < config.gamma_grid.size(); ++i)
        if (!(config.gamma_grid[i] > config.gamma_grid[i - 1]))
            throw ParameterError("gamma_grid must be strictly ascending");
    config.stop.validate();

    const double floor = error_floor(config.params).p_ef;
    const double threshold_db = snr_threshold(config.model, config.params.c(), config.x).gamma_th_db;

    std::vector<SweepRecord> out;
    out.reserve(config.gamma_grid.size());
    for (std::size_t i = 0; i < config.gamma_grid.size(); ++i) {
        SweepRecord r;
        r.gamma_db = config.gamma_grid[i];
        r.sigma2 = sigma_from_snr(r.gamma_db, config.params.c(), config.params.d_min()).sigma2;
        TrialPlan plan{config.params, config.model, r.gamma_db, config.stop,
                       derive_seed(config.master_seed, i), config.decode};
        r.bler = estimate_bler(plan, exec);
        r.bound = bler_upper_bound(config.params, r.sigma2, config.model, config.scheme).p_e_upper;
        r.floor = floor;
        r.threshold_db = threshold_db;
        r.master_seed = config.master_seed;
        r.hash = config.params.hash_id();
        out.push_back(r);
    }
    return out;
}

unsigned default_thread_count() noexcept {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace spinal
