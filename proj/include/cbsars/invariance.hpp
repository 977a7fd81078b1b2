#pragma once

// Paired runs that replay one recorded sample stream on two related problems
// and compare the state sequences: monotone transforms of f, translations, and
// rescalings of the search space.
//
// The checks are templated on the scalar type. In double precision a paired run
// stays pathwise identical only while sigma has moved by less than about 35 nats
// (rounding error is amplified by sigma_0 / sigma_t), so long horizons are
// verified with multiprecision scalars; see case_precision().

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cbsars/algorithms.hpp"
#include "cbsars/core.hpp"
#include "cbsars/objectives.hpp"

namespace cbsars::invariance {

struct PairedRunReport {
    double max_x_deviation = 0.0;      ///< relative
    double max_sigma_deviation = 0.0;  ///< relative
    std::size_t horizon = 0;
    double tolerance = 0.0;
    std::optional<std::size_t> fail_t;  ///< first iteration exceeding the tolerance
    std::optional<AlgorithmState> state_a;
    std::optional<AlgorithmState> state_b;
    std::optional<std::string> error;  ///< set when a run threw instead of completing

    bool pass() const { return !fail_t.has_value() && !error.has_value(); }
    std::string describe() const;
};

/// Where both runs of a pair begin (run B gets the mapped version of this state).
struct PairedRunSetup {
    AlgorithmState start;
    std::uint64_t seed = 0;
    std::size_t horizon = 1000;
};

bool is_power_of_two(double alpha);

namespace detail {

template <typename S>
VectorT<S> cast_vector(const Vector& v) {
    VectorT<S> out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out(i) = S(v(i));
    }
    return out;
}

template <typename S>
AlgorithmState to_double_state(const BasicAlgorithmState<S>& s) {
    Vector x(s.x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        x(i) = to_double(s.x(i));
    }
    return AlgorithmState(std::move(x), to_double(s.sigma));
}

template <typename S>
double rel(const S& diff, const S& scale) {
    return to_double(scale > 0 ? S(diff / scale) : diff);
}

// Drives both runs over one recorded stream. `deviation` maps (A, B) to the
// (x, sigma) relative deviations of B from the image of A.
template <typename S, typename Deviation>
PairedRunReport paired_run(const BasicAlgorithmSpec<S>& spec, const BasicObjectiveFn<S>& fa,
                           const BasicObjectiveFn<S>& fb, BasicAlgorithmState<S> a, BasicAlgorithmState<S> b,
                           const PairedRunSetup& setup, double tolerance, Deviation deviation) {
    PairedRunReport report;
    report.horizon = setup.horizon;
    report.tolerance = tolerance;
    RngStream rng(setup.seed);
    std::vector<BasicSampleBlock<S>> blocks;
    blocks.reserve(setup.horizon);
    for (std::size_t t = 0; t < setup.horizon; ++t) {
        blocks.push_back(spec.sampler(rng));
    }
    for (std::size_t t = 0; t < setup.horizon; ++t) {
        a = step(a, blocks[t], spec, fa);
        b = step(b, blocks[t], spec, fb);
        const auto [dx, ds] = deviation(a, b);
        report.max_x_deviation = std::max(report.max_x_deviation, dx);
        report.max_sigma_deviation = std::max(report.max_sigma_deviation, ds);
        if (!report.fail_t && (!(dx <= tolerance) || !(ds <= tolerance))) {
            report.fail_t = t + 1;
            report.state_a = to_double_state(a);
            report.state_b = to_double_state(b);
        }
    }
    return report;
}

}  // namespace detail

/// Runs spec on f and on g∘f; states must be identical at every iteration.
template <typename S>
PairedRunReport test_monotone_invariance(const BasicAlgorithmSpec<S>& spec, const objectives::BasicObjective<S>& f,
                                         const objectives::BasicTransform<S>& g, const PairedRunSetup& setup) {
    using std::abs;
    const auto composed = objectives::composite(g, f);
    const BasicAlgorithmState<S> start(detail::cast_vector<S>(setup.start.x), S(setup.start.sigma));
    return detail::paired_run(
        spec, f.fn(), composed.fn(), start, start, setup, 0.0,
        [](const BasicAlgorithmState<S>& a, const BasicAlgorithmState<S>& b) {
            const double dx = a.x == b.x ? 0.0 : detail::rel<S>((a.x - b.x).norm(), a.x.norm());
            const double ds = a.sigma == b.sigma ? 0.0 : detail::rel<S>(abs(a.sigma - b.sigma), a.sigma);
            return std::pair{dx, ds};
        });
}

/// Run A on f from (X0, s0); run B on x -> f(x - x0) from (X0 + x0, s0).
/// Checks X^B = X^A + x0 and sigma^B = sigma^A within `tolerance` relative.
template <typename S>
PairedRunReport test_translation_invariance(const BasicAlgorithmSpec<S>& spec, const objectives::BasicObjective<S>& f,
                                            const Vector& x0, const PairedRunSetup& setup, double tolerance = 1e-9) {
    using std::abs;
    if (x0.size() != setup.start.x.size()) {
        throw InvalidInput("translation offset has the wrong dimension");
    }
    const VectorT<S> off = detail::cast_vector<S>(x0);
    const auto fa = f.fn();
    BasicObjectiveFn<S> fb = [fa, off](const VectorT<S>& x) { return fa(x - off); };
    const BasicAlgorithmState<S> a0(detail::cast_vector<S>(setup.start.x), S(setup.start.sigma));
    const BasicAlgorithmState<S> b0(a0.x + off, a0.sigma);
    return detail::paired_run(spec, fa, fb, a0, b0, setup, tolerance,
                              [&off](const BasicAlgorithmState<S>& a, const BasicAlgorithmState<S>& b) {
                                  const VectorT<S> image = a.x + off;
                                  const double dx = detail::rel<S>((b.x - image).norm(), image.norm());
                                  const double ds = detail::rel<S>(abs(b.sigma - a.sigma), a.sigma);
                                  return std::pair{dx, ds};
                              });
}

/// Run A on f from (X0, s0); run B on x -> f(alpha x) from (X0/alpha, s0/alpha).
/// Tolerance 0 (bit-exact after rescaling) when alpha is a power of two, else 1e-9 relative.
template <typename S>
PairedRunReport test_scale_invariance(const BasicAlgorithmSpec<S>& spec, const objectives::BasicObjective<S>& f,
                                      double alpha, const PairedRunSetup& setup,
                                      std::optional<double> tolerance = std::nullopt) {
    using std::abs;
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw InvalidInput("scale factor must be positive and finite");
    }
    const double tol = tolerance.value_or(is_power_of_two(alpha) ? 0.0 : 1e-9);
    const S a_s(alpha);
    const auto fa = f.fn();
    BasicObjectiveFn<S> fb = [fa, a_s](const VectorT<S>& x) { return fa(VectorT<S>(a_s * x)); };
    const BasicAlgorithmState<S> a0(detail::cast_vector<S>(setup.start.x), S(setup.start.sigma));
    const BasicAlgorithmState<S> b0(a0.x / a_s, a0.sigma / a_s);
    return detail::paired_run(spec, fa, fb, a0, b0, setup, tol,
                              [a_s](const BasicAlgorithmState<S>& a, const BasicAlgorithmState<S>& b) {
                                  const VectorT<S> image = a_s * b.x;
                                  const double dx = detail::rel<S>((image - a.x).norm(), a.x.norm());
                                  const double ds = detail::rel<S>(abs(a_s * b.sigma - a.sigma), a.sigma);
                                  return std::pair{dx, ds};
                              });
}

/// One entry of the invariance suite. For translation and scale cases the
/// objective is transform∘objective.
struct SuiteCase {
    enum class Kind { monotone, translation, scale };

    std::string algorithm;
    std::string objective;
    std::string transform = "identity";
    Kind kind = Kind::monotone;
    double alpha = 1.0;   ///< scale
    double offset = 1.0;  ///< translation by offset * (1, ..., 1)

    std::string label() const;
};

struct SuiteResult {
    SuiteCase which;
    PairedRunReport report;
    unsigned digits = 0;  ///< decimal digits of the scalar used (0 for double)
};

/// {csa, xnes, sa, oneplusone} x {sphere, quad:ellipsoid, pnorm:1, linear} x
/// {identity, g^{1/4}, arctan} x {monotone, translation by (1..1), scale by 2^-4, 3, 2^10}.
std::vector<SuiteCase> standard_suite();

/// True when the case's identity is exact in any binary floating-point type
/// (identity transform, power-of-two scale), so it is run in double.
bool exact_in_double(const SuiteCase& c);

/// Decimal digits that keep the case's paired run well inside `tolerance`,
/// from a double-precision run of the same (algorithm, objective, setup): the
/// largest excursion of ln sigma and ln ||X - x*|| bounds the amplification of
/// rounding error.
unsigned case_precision(const SuiteCase& c, Eigen::Index n, const PairedRunSetup& setup, double tolerance = 1e-10);

/// Runs one case with scalar type S (HighPrecision needs the precision set by the caller).
template <typename S>
PairedRunReport run_case(const SuiteCase& c, Eigen::Index n, const PairedRunSetup& setup) {
    const auto spec = algorithms::make_algorithm<S>(c.algorithm, n);
    const auto base = objectives::make_objective<S>(c.objective, n);
    const auto desc = objectives::parse_objective(c.transform + "@" + c.objective, n);
    const auto composed = objectives::build_objective<S>(desc, VectorT<S>(VectorT<S>::Zero(n)));
    switch (c.kind) {
        case SuiteCase::Kind::monotone: {
            objectives::BasicTransform<S> g = objectives::identity_transform<S>();
            if (c.transform == "g^{1/4}" || c.transform == "quarter") {
                g = objectives::quarter_root<S>();
            } else if (c.transform == "arctan") {
                g = objectives::arctan_transform<S>();
            } else if (c.transform != "identity") {
                throw InvalidInput("unknown transform '" + c.transform + "'");
            }
            return test_monotone_invariance<S>(spec, base, g, setup);
        }
        case SuiteCase::Kind::translation:
            return test_translation_invariance<S>(spec, composed, Vector::Constant(n, c.offset), setup);
        case SuiteCase::Kind::scale:
            return test_scale_invariance<S>(spec, composed, c.alpha, setup);
    }
    throw InvalidInput("unknown suite case kind");
}

/// Runs each case in double when exact_in_double(), otherwise in the smallest
/// multiprecision tier holding case_precision() digits. Cases run in parallel.
std::vector<SuiteResult> run_suite(const std::vector<SuiteCase>& cases, Eigen::Index n, const PairedRunSetup& setup,
                                   unsigned threads = 0);

}  // namespace cbsars::invariance
