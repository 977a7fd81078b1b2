#pragma once

// The four concrete step-size adaptive algorithms, plus a constant step-size
// baseline, each packaged as an AlgorithmSpec.
//
//   csa        (1,p) weighted recombination, path-length control without cumulation
//   xnes       (1,p) weighted recombination, natural-gradient step-size update
//   sa         (1,p) self-adaptation with log-normal step-size mutation
//   oneplusone (1+1) elitist ES with the generalized one-fifth success rule
//   constant   (1+1) elitist ES with the step-size frozen

#include <cmath>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "cbsars/core.hpp"

namespace cbsars::algorithms {

struct CommaEsParams {
    double kappa_m = 1.0;
    double kappa_sigma = 1.0;
    std::vector<double> weights;  ///< w_1 >= ... >= w_p, sum |w_i| = 1
    double mu_w = 1.0;            ///< 1 / sum w_i^2
    double chi_mean = 1.0;        ///< E||N(0, I_n)||

    /// Derives mu_w and chi_mean and validates the weight vector.
    static CommaEsParams make(Eigen::Index n, std::vector<double> weights, double kappa_m = 1.0,
                              double kappa_sigma = 1.0);
};

struct SaParams {
    double tau = 1.0;
    std::size_t p = 2;

    /// tau defaults to 1/sqrt(n).
    static SaParams make(Eigen::Index n, std::size_t p, std::optional<double> tau = std::nullopt);
};

struct OnePlusOneParams {
    double gamma = 1.0;  ///< success multiplier exp(kappa_sigma)
    double q = 4.0;      ///< (1 - p_target) / p_target

    static OnePlusOneParams make(double kappa_sigma = 1.0 / 3.0, double p_target = 0.2);

    double failure_factor() const { return std::pow(gamma, -1.0 / q); }
};

std::size_t default_population(Eigen::Index n);

/// Default recombination weights ln(p/2 + 1/2) - ln i for i <= floor(p/2), zero
/// beyond, normalized to sum to one.
std::vector<double> default_weights(std::size_t p);

/// E||N(0, I_n)|| = sqrt(2) Gamma((n+1)/2) / Gamma(n/2), via log-gamma.
double chi_mean(Eigen::Index n);

template <typename S>
VectorT<S> sol_es(const BasicAlgorithmState<S>& state, const Eigen::Ref<const VectorT<S>>& u) {
    return state.x + state.sigma * u;
}

/// x + sigma exp(tau [u]_{n+1}) [u]_{1..n}
template <typename S>
VectorT<S> sol_sa(const BasicAlgorithmState<S>& state, const Eigen::Ref<const VectorT<S>>& u, double tau) {
    using std::exp;
    const Eigen::Index n = state.x.size();
    const S scale = state.sigma * exp(S(tau) * u(n));
    return state.x + scale * u.head(n);
}

/// sum_i w_i y^i over the leading weights.size() coordinates of y.
template <typename S>
VectorT<S> recombine(const BasicSampleBlock<S>& y, const std::vector<double>& weights) {
    VectorT<S> sum = VectorT<S>::Zero(y.dim());
    const std::size_t k = std::min(weights.size(), y.size());
    for (std::size_t i = 0; i < k; ++i) {
        if (weights[i] != 0.0) {
            sum += S(weights[i]) * y.coord(i);
        }
    }
    return sum;
}

template <typename S>
VectorT<S> mean_comma(const BasicAlgorithmState<S>& state, const BasicSampleBlock<S>& y, const CommaEsParams& params) {
    return state.x + (S(params.kappa_m) * state.sigma) * recombine(y, params.weights);
}

template <typename S>
S sigma_csa(const S& sigma, const BasicSampleBlock<S>& y, const CommaEsParams& params) {
    using std::exp;
    using std::sqrt;
    const S len = sqrt(S(params.mu_w)) * recombine(y, params.weights).norm();
    return sigma * exp(S(params.kappa_sigma) * (len / S(params.chi_mean) - S(1)));
}

template <typename S>
S sigma_xnes(const S& sigma, const BasicSampleBlock<S>& y, const CommaEsParams& params) {
    using std::exp;
    const S n = S(static_cast<double>(y.dim()));
    S acc = S(0);
    const std::size_t k = std::min(params.weights.size(), y.size());
    for (std::size_t i = 0; i < k; ++i) {
        if (params.weights[i] != 0.0) {
            acc += S(params.weights[i]) * (y.coord(i).squaredNorm() - n);
        }
    }
    return sigma * exp(S(params.kappa_sigma) / (S(2) * n) * acc);
}

template <typename S>
VectorT<S> mean_sa(const BasicAlgorithmState<S>& state, const BasicSampleBlock<S>& y, const SaParams& params) {
    return sol_sa<S>(state, y.coord(0), params.tau);
}

template <typename S>
S sigma_sa(const S& sigma, const BasicSampleBlock<S>& y, const SaParams& params) {
    using std::exp;
    return sigma * exp(S(params.tau) * y.coord(0)(y.dim() - 1));
}

template <typename S>
VectorT<S> mean_oneplusone(const BasicAlgorithmState<S>& state, const BasicSampleBlock<S>& y) {
    return sol_es<S>(state, y.coord(0));
}

/// sigma * gamma on success (y^1 != 0), sigma * gamma^{-1/q} otherwise.
template <typename S>
S sigma_oneplusone(const S& sigma, const BasicSampleBlock<S>& y, const OnePlusOneParams& params) {
    const bool success = !y.coord(0).isZero(0);
    return sigma * S(success ? params.gamma : params.failure_factor());
}

template <typename S>
BasicAlgorithmState<S> g_comma_csa(const BasicAlgorithmState<S>& state, const BasicSampleBlock<S>& y,
                                   const CommaEsParams& params) {
    return {mean_comma(state, y, params), sigma_csa(state.sigma, y, params)};
}

template <typename S>
BasicAlgorithmState<S> g_comma_xnes(const BasicAlgorithmState<S>& state, const BasicSampleBlock<S>& y,
                                    const CommaEsParams& params) {
    return {mean_comma(state, y, params), sigma_xnes(state.sigma, y, params)};
}

template <typename S>
BasicAlgorithmState<S> g_sa(const BasicAlgorithmState<S>& state, const BasicSampleBlock<S>& y, const SaParams& params) {
    return {mean_sa(state, y, params), sigma_sa(state.sigma, y, params)};
}

template <typename S>
BasicAlgorithmState<S> g_oneplusone(const BasicAlgorithmState<S>& state, const BasicSampleBlock<S>& y,
                                    const OnePlusOneParams& params) {
    return {mean_oneplusone(state, y), sigma_oneplusone(state.sigma, y, params)};
}

/// Candidate first, incumbent second; the candidate ranks first only on strict improvement.
template <typename S>
RankingPermutation rank_plus(std::span<const S> values) {
    if (values.size() != 2) {
        throw InvalidInput("plus-selection ranks exactly two values");
    }
    if (!is_finite(values[0]) || !is_finite(values[1])) {
        throw InvalidInput("plus-selection: non-finite value");
    }
    return values[0] < values[1] ? RankingPermutation({0, 1}) : RankingPermutation({1, 0});
}

namespace detail {

template <typename S>
MatrixT<S> normal_matrix(Eigen::Index rows, Eigen::Index cols, RngStream& rng) {
    MatrixT<S> out(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            out(i, j) = S(rng.normal());
        }
    }
    return out;
}

template <typename S>
typename BasicAlgorithmSpec<S>::Sampler gaussian_sampler(Eigen::Index m, std::size_t p) {
    return [m, p](RngStream& rng) {
        return BasicSampleBlock<S>(normal_matrix<S>(m, static_cast<Eigen::Index>(p), rng));
    };
}

// (u^1, 0): one Gaussian step and the zero step that re-evaluates the incumbent.
template <typename S>
typename BasicAlgorithmSpec<S>::Sampler plus_sampler(Eigen::Index n) {
    return [n](RngStream& rng) {
        MatrixT<S> u = MatrixT<S>::Zero(n, 2);
        u.col(0) = normal_matrix<S>(n, 1, rng);
        return BasicSampleBlock<S>(std::move(u));
    };
}

template <typename S>
BasicAlgorithmSpec<S> comma_base(std::string name, Eigen::Index n, std::size_t p) {
    BasicAlgorithmSpec<S> spec;
    spec.name = std::move(name);
    spec.n = n;
    spec.m = n;
    spec.p = p;
    spec.evals_per_iteration = p;
    spec.sol = [](const BasicAlgorithmState<S>& s, const Eigen::Ref<const VectorT<S>>& u) { return sol_es<S>(s, u); };
    spec.sampler = gaussian_sampler<S>(n, p);
    return spec;
}

template <typename S>
BasicAlgorithmSpec<S> plus_base(std::string name, Eigen::Index n) {
    BasicAlgorithmSpec<S> spec;
    spec.name = std::move(name);
    spec.n = n;
    spec.m = n;
    spec.p = 2;
    spec.evals_per_iteration = 1;
    spec.sol = [](const BasicAlgorithmState<S>& s, const Eigen::Ref<const VectorT<S>>& u) { return sol_es<S>(s, u); };
    spec.g1 = [](const BasicAlgorithmState<S>& s, const BasicSampleBlock<S>& y) { return mean_oneplusone<S>(s, y); };
    spec.sampler = plus_sampler<S>(n);
    spec.rank = [](std::span<const S> v) { return rank_plus<S>(v); };
    return spec;
}

}  // namespace detail

template <typename S = double>
BasicAlgorithmSpec<S> csa_spec(Eigen::Index n, CommaEsParams params) {
    auto spec = detail::comma_base<S>("csa", n, params.weights.size());
    spec.g1 = [params](const BasicAlgorithmState<S>& s, const BasicSampleBlock<S>& y) {
        return mean_comma<S>(s, y, params);
    };
    spec.g2 = [params](const S& sigma, const BasicSampleBlock<S>& y) { return sigma_csa<S>(sigma, y, params); };
    return spec;
}

template <typename S = double>
BasicAlgorithmSpec<S> xnes_spec(Eigen::Index n, CommaEsParams params) {
    auto spec = detail::comma_base<S>("xnes", n, params.weights.size());
    spec.g1 = [params](const BasicAlgorithmState<S>& s, const BasicSampleBlock<S>& y) {
        return mean_comma<S>(s, y, params);
    };
    spec.g2 = [params](const S& sigma, const BasicSampleBlock<S>& y) { return sigma_xnes<S>(sigma, y, params); };
    return spec;
}

template <typename S = double>
BasicAlgorithmSpec<S> sa_spec(Eigen::Index n, SaParams params) {
    BasicAlgorithmSpec<S> spec;
    spec.name = "sa";
    spec.n = n;
    spec.m = n + 1;
    spec.p = params.p;
    spec.evals_per_iteration = params.p;
    const double tau = params.tau;
    spec.sol = [tau](const BasicAlgorithmState<S>& s, const Eigen::Ref<const VectorT<S>>& u) {
        return sol_sa<S>(s, u, tau);
    };
    spec.g1 = [params](const BasicAlgorithmState<S>& s, const BasicSampleBlock<S>& y) {
        return mean_sa<S>(s, y, params);
    };
    spec.g2 = [params](const S& sigma, const BasicSampleBlock<S>& y) { return sigma_sa<S>(sigma, y, params); };
    spec.sampler = detail::gaussian_sampler<S>(n + 1, params.p);
    return spec;
}

template <typename S = double>
BasicAlgorithmSpec<S> oneplusone_spec(Eigen::Index n, OnePlusOneParams params) {
    auto spec = detail::plus_base<S>("oneplusone", n);
    spec.g2 = [params](const S& sigma, const BasicSampleBlock<S>& y) {
        return sigma_oneplusone<S>(sigma, y, params);
    };
    return spec;
}

template <typename S = double>
BasicAlgorithmSpec<S> constant_spec(Eigen::Index n) {
    auto spec = detail::plus_base<S>("constant", n);
    spec.g2 = [](const S& sigma, const BasicSampleBlock<S>&) { return sigma; };
    return spec;
}

/// Parameter overrides for make_algorithm; unset fields take the defaults.
struct AlgorithmOptions {
    std::optional<double> kappa_m;
    std::optional<double> kappa_sigma;
    std::optional<std::size_t> p;
    std::optional<double> p_target;
    std::optional<double> tau;
};

const std::vector<std::string_view>& algorithm_names();

/// Registry lookup: "csa", "xnes", "sa", "oneplusone", "constant".
template <typename S = double>
BasicAlgorithmSpec<S> make_algorithm(std::string_view name, Eigen::Index n, const AlgorithmOptions& options = {}) {
    if (n < 1) {
        throw InvalidInput("dimension must be >= 1");
    }
    if (name == "csa" || name == "xnes") {
        const std::size_t p = options.p.value_or(default_population(n));
        auto params = CommaEsParams::make(n, default_weights(p), options.kappa_m.value_or(1.0),
                                          options.kappa_sigma.value_or(1.0));
        return name == "csa" ? csa_spec<S>(n, std::move(params)) : xnes_spec<S>(n, std::move(params));
    }
    if (name == "sa") {
        return sa_spec<S>(n, SaParams::make(n, options.p.value_or(default_population(n)), options.tau));
    }
    if (name == "oneplusone") {
        return oneplusone_spec<S>(n, OnePlusOneParams::make(options.kappa_sigma.value_or(1.0 / 3.0),
                                                            options.p_target.value_or(0.2)));
    }
    if (name == "constant") {
        return constant_spec<S>(n);
    }
    throw InvalidInput("unknown algorithm '" + std::string(name) + "'");
}

}  // namespace cbsars::algorithms
