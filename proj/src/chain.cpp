#include "cbsars/chain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cbsars/algorithms.hpp"
#include "cbsars/multiprecision.hpp"

namespace cbsars::chain {

std::size_t default_burn_in(std::size_t steps) { return std::min<std::size_t>(steps / 5, 10'000); }

CREstimate estimate_cr(std::span<const double> log_eta, std::size_t burn_in) {
    if (burn_in >= log_eta.size()) {
        throw InvalidInput("estimate_cr: burn-in must be shorter than the series");
    }
    const auto tail = log_eta.subspan(burn_in);
    const std::size_t n = tail.size();
    const auto batches = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    if (batches < 10 || n / batches < 1) {
        throw InsufficientData("estimate_cr: fewer than 10 post-burn-in batches");
    }
    const std::size_t batch_len = n / batches;

    const double mean = std::accumulate(tail.begin(), tail.end(), 0.0) / static_cast<double>(n);
    std::vector<double> batch_means(batches);
    for (std::size_t b = 0; b < batches; ++b) {
        const auto first = tail.begin() + static_cast<std::ptrdiff_t>(b * batch_len);
        batch_means[b] = std::accumulate(first, first + static_cast<std::ptrdiff_t>(batch_len), 0.0) /
                         static_cast<double>(batch_len);
    }
    const double bm_mean =
        std::accumulate(batch_means.begin(), batch_means.end(), 0.0) / static_cast<double>(batches);
    double ss = 0.0;
    for (const double m : batch_means) {
        ss += (m - bm_mean) * (m - bm_mean);
    }
    const double var = ss / static_cast<double>(batches - 1);

    CREstimate est;
    est.cr = -mean;
    est.half_width = 1.96 * std::sqrt(var / static_cast<double>(batches));
    est.samples = log_eta.size();
    est.burn_in = burn_in;
    return est;
}

CREstimate estimate_cr(const std::vector<StepOutcome>& outcomes, std::size_t burn_in) {
    std::vector<double> le(outcomes.size());
    std::transform(outcomes.begin(), outcomes.end(), le.begin(), [](const StepOutcome& o) { return o.log_eta; });
    return estimate_cr(le, burn_in);
}

MonteCarloMean sample_mean(std::span<const double> values) {
    if (values.empty()) {
        throw InvalidInput("sample_mean: empty sample");
    }
    const double k = static_cast<double>(values.size());
    MonteCarloMean out;
    out.samples = values.size();
    out.mean = std::accumulate(values.begin(), values.end(), 0.0) / k;
    if (values.size() > 1) {
        double ss = 0.0;
        for (const double v : values) {
            ss += (v - out.mean) * (v - out.mean);
        }
        out.stderr_ = std::sqrt(ss / (k - 1.0) / k);
    }
    return out;
}

double log_progress_check(const CoupledTrace& trace) {
    double worst = 0.0;
    for (std::size_t t = 0; t + 1 < trace.rows.size(); ++t) {
        const auto& a = trace.rows[t];
        const auto& b = trace.rows[t + 1];
        if (!std::isfinite(a.log_x_norm) || !std::isfinite(b.log_x_norm) || !std::isfinite(a.log_z_norm) ||
            !std::isfinite(b.log_z_norm)) {
            throw DegenerateState("log_progress_check: zero norm in the trace");
        }
        const double dev = (b.log_x_norm - a.log_x_norm) - (b.log_z_norm - a.log_z_norm) - a.log_eta;
        worst = std::max(worst, std::abs(dev));
    }
    return worst;
}

double sigma_telescoping_check(const CoupledTrace& trace) {
    double worst = 0.0;
    double sum = 0.0;
    const double log_sigma0 = trace.rows.front().log_sigma;
    for (std::size_t t = 1; t < trace.rows.size(); ++t) {
        sum += trace.rows[t - 1].log_eta;
        const double td = static_cast<double>(t);
        worst = std::max(worst, std::abs((trace.rows[t].log_sigma - log_sigma0) / td - sum / td));
    }
    return worst;
}

double contraction_depth(const CoupledTrace& trace) {
    double depth = 0.0;
    const auto& first = trace.rows.front();
    for (const auto& row : trace.rows) {
        depth = std::max({depth, std::abs(row.log_sigma - first.log_sigma), std::abs(row.log_x_norm - first.log_x_norm)});
    }
    return depth;
}

double max_coupling_deviation(const CoupledTrace& trace) {
    double worst = 0.0;
    for (const auto& row : trace.rows) {
        worst = std::max(worst, row.z_rel_dev);
    }
    return worst;
}

CouplingCheck verified_coupling(const std::string& algorithm, const AlgorithmState& start, std::size_t steps,
                                std::uint64_t seed, double tolerance) {
    const Eigen::Index n = start.x.size();
    CouplingCheck out;
    {
        RngStream rng(seed);
        const auto trace = run_coupled(start, algorithms::make_algorithm<double>(algorithm, n),
                                       objectives::make_objective<double>("sphere", n), steps, rng);
        out.depth = contraction_depth(trace);
    }
    // The pilot run is only statistically close to the exact one; allow 5% more depth.
    out.digits = digits_for_depth(1.05 * out.depth, tolerance);
    PrecisionScope scope(out.digits);
    VectorT<HighPrecision> x(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        x(i) = HighPrecision(start.x(i));
    }
    RngStream rng(seed);
    out.trace = run_coupled(BasicAlgorithmState<HighPrecision>(std::move(x), HighPrecision(start.sigma)),
                            algorithms::make_algorithm<HighPrecision>(algorithm, n),
                            objectives::make_objective<HighPrecision>("sphere", n), steps, rng);
    out.max_z_deviation = max_coupling_deviation(out.trace);
    out.log_progress_deviation = log_progress_check(out.trace);
    out.telescoping_deviation = sigma_telescoping_check(out.trace);
    return out;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw InvalidInput("fit_line: need at least two paired points");
    }
    const double k = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / k;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / k;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) {
        throw InvalidInput("fit_line: x values are all equal");
    }
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    return fit;
}

}  // namespace cbsars::chain
