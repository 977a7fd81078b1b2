#pragma once

// The normalized chain Z_t = (X_t - x*) / sigma_t, its log step-size
// multipliers, and convergence-rate estimation from them.
//
// For a translation- and scale-invariant algorithm on a function that is
// scaling-invariant about x*, Z_t evolves without reference to (X_t, sigma_t):
//   Z_{t+1} = G1((Z_t, 1), Y) / G2(1, Y),   Y = ranked block at (Z_t, 1),
// and ln(sigma_{t+1} / sigma_t) = ln G2(1, Y). The convergence rate is minus the
// stationary mean of that log multiplier.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <cstdint>
#include <type_traits>
#include <vector>

#include "cbsars/core.hpp"
#include "cbsars/objectives.hpp"

namespace cbsars::chain {

template <typename S>
struct BasicNormalizedState {
    explicit BasicNormalizedState(VectorT<S> z_) : z(std::move(z_)) {
        if (!all_finite(z)) {
            throw InvalidInput("normalized state contains a non-finite coordinate");
        }
    }

    VectorT<S> z;
};

using NormalizedState = BasicNormalizedState<double>;

template <typename S>
struct BasicStepOutcome {
    BasicNormalizedState<S> z_next;
    double log_eta;
    BasicSampleBlock<S> ranked_block;
    S eta;
};

using StepOutcome = BasicStepOutcome<double>;

/// Sign convention: cr > 0 means sigma_t decreases geometrically.
struct CREstimate {
    double cr = 0.0;
    double half_width = 0.0;  ///< 95% batch-means interval
    std::size_t samples = 0;
    std::size_t burn_in = 0;
};

/// One row of an unnormalized trajectory. log_eta is ln(sigma_t / sigma_{t-1}), zero at t = 0.
struct TrajectoryRecord {
    std::size_t t = 0;
    std::size_t evals = 0;
    double x_norm = 0.0;
    double sigma = 0.0;
    double z_norm = 0.0;
    double log_eta = 0.0;
};

/// `f` takes offsets from the reference point (Objective::centered_fn()).
template <typename S>
BasicStepOutcome<S> normalized_step(const BasicNormalizedState<S>& z, const BasicSampleBlock<S>& u,
                                    const BasicAlgorithmSpec<S>& spec, const BasicObjectiveFn<S>& f) {
    const BasicAlgorithmState<S> unit(z.z, S(1));
    BasicSampleBlock<S> y = select(unit, u, spec, f);
    const S eta = spec.g2(S(1), y);
    if (!(eta > 0)) {
        throw InvariantViolation(spec.name + ": step-size multiplier is not positive");
    }
    VectorT<S> next = spec.g1(unit, y) / eta;
    const double le = log_of(eta);
    return BasicStepOutcome<S>{BasicNormalizedState<S>(std::move(next)), le, std::move(y), eta};
}

template <typename S>
BasicStepOutcome<S> normalized_step(const BasicNormalizedState<S>& z, const BasicSampleBlock<S>& u,
                                    const BasicAlgorithmSpec<S>& spec, const objectives::BasicObjective<S>& f) {
    return normalized_step(z, u, spec, f.centered_fn());
}

/// Iterates normalized_step with fresh blocks from spec.sampler and calls
/// `visit(t, outcome)` for t = 0..steps-1. Throws DegenerateState if z0 = 0.
template <typename S, typename Visit>
void for_each_chain_step(const BasicNormalizedState<S>& z0, const BasicAlgorithmSpec<S>& spec,
                         const objectives::BasicObjective<S>& f, std::size_t steps, RngStream& rng, Visit&& visit) {
    if (z0.z.isZero(0)) {
        throw DegenerateState("normalized chain cannot start at the reference point");
    }
    const auto fc = f.centered_fn();
    BasicNormalizedState<S> z = z0;
    for (std::size_t t = 0; t < steps; ++t) {
        BasicStepOutcome<S> out = normalized_step(z, spec.sampler(rng), spec, fc);
        visit(t, static_cast<const BasicStepOutcome<S>&>(out));
        z = std::move(out.z_next);
    }
}

template <typename S>
std::vector<BasicStepOutcome<S>> run_chain(const BasicNormalizedState<S>& z0, const BasicAlgorithmSpec<S>& spec,
                                           const objectives::BasicObjective<S>& f, std::size_t steps,
                                           RngStream& rng) {
    std::vector<BasicStepOutcome<S>> outcomes;
    outcomes.reserve(steps);
    for_each_chain_step(z0, spec, f, steps, rng,
                        [&](std::size_t, const BasicStepOutcome<S>& out) { outcomes.push_back(out); });
    return outcomes;
}

/// Only the log multipliers of a chain run, the input of estimate_cr.
template <typename S>
std::vector<double> chain_log_eta(const BasicNormalizedState<S>& z0, const BasicAlgorithmSpec<S>& spec,
                                  const objectives::BasicObjective<S>& f, std::size_t steps, RngStream& rng) {
    std::vector<double> out;
    out.reserve(steps);
    for_each_chain_step(z0, spec, f, steps, rng,
                        [&](std::size_t, const BasicStepOutcome<S>& o) { out.push_back(o.log_eta); });
    return out;
}

/// min(20% of the steps, 10^4).
std::size_t default_burn_in(std::size_t steps);

/// cr = -mean(log_eta[burn_in:]); the half-width is 1.96 times the standard error
/// of ceil(sqrt(N)) batch means. Throws InsufficientData with fewer than 10 batches.
CREstimate estimate_cr(std::span<const double> log_eta, std::size_t burn_in);
CREstimate estimate_cr(const std::vector<StepOutcome>& outcomes, std::size_t burn_in);

struct MonteCarloMean {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t samples = 0;
};

/// Mean and standard error of a sample.
MonteCarloMean sample_mean(std::span<const double> values);

/// Monte-Carlo estimate of R(z) = E[ln eta*(Y(z, U))].
template <typename S>
MonteCarloMean estimate_r_of_z(const BasicNormalizedState<S>& z, const BasicAlgorithmSpec<S>& spec,
                               const objectives::BasicObjective<S>& f, std::size_t mc_samples, RngStream& rng) {
    if (mc_samples < 1) {
        throw InvalidInput("estimate_r_of_z: need at least one sample");
    }
    const auto fc = f.centered_fn();
    std::vector<double> le(mc_samples);
    for (auto& v : le) {
        v = normalized_step(z, spec.sampler(rng), spec, fc).log_eta;
    }
    return sample_mean(le);
}

/// One iteration of a run that advances (X_t - x*, sigma_t) with core::step and
/// Z_t with normalized_step on the same block. Norms are logs so that long runs
/// neither underflow nor overflow.
struct CoupledStep {
    double log_x_norm = 0.0;  ///< ln ||X_t - x*||
    double log_sigma = 0.0;   ///< ln sigma_t
    double log_z_norm = 0.0;  ///< ln ||Z_t||
    double log_eta = 0.0;     ///< ln eta* of the step t -> t+1 (0 on the last row)
    double z_rel_dev = 0.0;   ///< ||Z_t - (X_t - x*)/sigma_t|| / ||Z_t||
};

struct CoupledTrace {
    std::vector<CoupledStep> rows;  ///< rows[t] for t = 0..steps
};

/// With a floating-point S the unnormalized side is kept in a power-of-two
/// scaled representation: when sigma leaves [2^-200, 2^200] both X - x* and
/// sigma are multiplied by the same power of two. The scaling is exact, leaves
/// (X - x*)/sigma bit-identical, and preserves rankings on scaling-invariant f.
template <typename S>
CoupledTrace run_coupled(const BasicAlgorithmState<S>& start, const BasicAlgorithmSpec<S>& spec,
                         const objectives::BasicObjective<S>& f, std::size_t steps, RngStream& rng) {
    constexpr int kMaxExponent = 200;
    const auto fc = f.centered_fn();
    const double ln2 = std::log(2.0);

    BasicAlgorithmState<S> xs(start.x - f.reference(), start.sigma);
    BasicNormalizedState<S> z(xs.x / xs.sigma);
    long scale_exp = 0;  // true (X - x*, sigma) = stored * 2^scale_exp

    auto row_for = [&](const BasicAlgorithmState<S>& s, const BasicNormalizedState<S>& zt) {
        CoupledStep row;
        const S zn2 = zt.z.squaredNorm();
        const VectorT<S> ratio = s.x / s.sigma;
        row.log_x_norm = 0.5 * log_of(S(s.x.squaredNorm())) + static_cast<double>(scale_exp) * ln2;
        row.log_sigma = log_of(s.sigma) + static_cast<double>(scale_exp) * ln2;
        row.log_z_norm = 0.5 * log_of(zn2);
        const S dev2 = (zt.z - ratio).squaredNorm();
        row.z_rel_dev = std::sqrt(to_double(zn2 > 0 ? S(dev2 / zn2) : dev2));
        return row;
    };

    CoupledTrace trace;
    trace.rows.reserve(steps + 1);
    trace.rows.push_back(row_for(xs, z));
    for (std::size_t t = 0; t < steps; ++t) {
        const BasicSampleBlock<S> u = spec.sampler(rng);
        BasicStepOutcome<S> out = normalized_step(z, u, spec, fc);
        xs = step(xs, u, spec, fc);
        trace.rows.back().log_eta = out.log_eta;
        z = std::move(out.z_next);

        if constexpr (std::is_floating_point_v<S>) {
            const int e = std::ilogb(xs.sigma);
            if (e > kMaxExponent || e < -kMaxExponent) {
                xs.x = xs.x * std::ldexp(S(1), -e);
                xs.sigma = std::ldexp(xs.sigma, -e);
                scale_exp += e;
            }
        }
        trace.rows.push_back(row_for(xs, z));
    }
    return trace;
}

/// max_t |ln(||X_{t+1}||/||X_t||) - ln(||Z_{t+1}||/||Z_t||) - log_eta_t|.
/// Throws DegenerateState if any norm is zero.
double log_progress_check(const CoupledTrace& trace);

/// max_t |(1/t) ln(sigma_t/sigma_0) - mean(log_eta_0..log_eta_{t-1})|.
double sigma_telescoping_check(const CoupledTrace& trace);

/// max_t z_rel_dev.
double max_coupling_deviation(const CoupledTrace& trace);

/// Largest distance in nats of ln sigma_t and ln ||X_t - x*|| from their start
/// values: how far rounding error can be amplified along the run.
double contraction_depth(const CoupledTrace& trace);

/// A coupled run of a registry algorithm on the sphere (reference 0), carried
/// out in multiprecision with enough digits for `tolerance` over the whole
/// horizon. The digit count comes from a double run with the same seed.
struct CouplingCheck {
    CoupledTrace trace;
    double depth = 0.0;  ///< contraction_depth of the double-precision pilot run
    unsigned digits = 0;
    double max_z_deviation = 0.0;
    double log_progress_deviation = 0.0;
    double telescoping_deviation = 0.0;
};

CouplingCheck verified_coupling(const std::string& algorithm, const AlgorithmState& start, std::size_t steps,
                                std::uint64_t seed, double tolerance = 1e-10);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Ordinary least squares of y against x.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

/// Plain trajectory of core::step for traces and experiments.
struct TrajectoryOptions {
    std::size_t max_evals = 1'000'000;
    std::optional<double> target_f;
    bool stop_at_target = true;
    std::size_t stride = 1;  ///< keep every stride-th row (first and last always kept)
};

struct TrajectoryResult {
    std::vector<TrajectoryRecord> records;
    double final_f = 0.0;
    std::optional<std::size_t> evals_to_target;
    std::size_t iterations = 0;
};

template <typename S>
TrajectoryResult run_trajectory(const BasicAlgorithmState<S>& start, const BasicAlgorithmSpec<S>& spec,
                                const objectives::BasicObjective<S>& f, const TrajectoryOptions& options,
                                RngStream& rng) {
    if (options.stride < 1) {
        throw InvalidInput("trajectory stride must be >= 1");
    }
    const auto fx = f.fn();
    TrajectoryResult result;
    BasicAlgorithmState<S> state = start;

    auto record = [&](std::size_t t, double log_eta) {
        const VectorT<S> d = state.x - f.reference();
        TrajectoryRecord r;
        r.t = t;
        r.evals = t * spec.evals_per_iteration;
        r.x_norm = to_double(S(d.norm()));
        r.sigma = to_double(state.sigma);
        r.z_norm = to_double(S(d.norm() / state.sigma));
        r.log_eta = log_eta;
        return r;
    };

    S fval = fx(state.x);
    std::size_t t = 0;
    result.records.push_back(record(0, 0.0));
    if (options.target_f && to_double(fval) <= *options.target_f) {
        result.evals_to_target = 0;
    }
    while ((t + 1) * spec.evals_per_iteration <= options.max_evals) {
        if (result.evals_to_target && options.stop_at_target) {
            break;
        }
        const BasicSampleBlock<S> y = select(state, spec.sampler(rng), spec, fx);
        const double log_eta = log_of(S(spec.g2(S(1), y)));
        state = update(state, y, spec);
        ++t;
        fval = fx(state.x);
        if (!is_finite(fval)) {
            Vector where(state.x.size());
            for (Eigen::Index k = 0; k < where.size(); ++k) {
                where(k) = to_double(state.x(k));
            }
            throw EvaluationError("objective returned a non-finite value", std::move(where));
        }
        if (options.target_f && !result.evals_to_target && to_double(fval) <= *options.target_f) {
            result.evals_to_target = t * spec.evals_per_iteration;
        }
        const bool last = (t + 1) * spec.evals_per_iteration > options.max_evals ||
                          (result.evals_to_target && options.stop_at_target);
        if (t % options.stride == 0 || last) {
            result.records.push_back(record(t, log_eta));
        }
    }
    result.final_f = to_double(fval);
    result.iterations = t;
    return result;
}

}  // namespace cbsars::chain
