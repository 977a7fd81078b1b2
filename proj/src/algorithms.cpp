#include "cbsars/algorithms.hpp"

namespace cbsars::algorithms {

namespace {

void require(bool ok, const char* message) {
    if (!ok) {
        throw InvalidInput(message);
    }
}

}  // namespace

CommaEsParams CommaEsParams::make(Eigen::Index n, std::vector<double> weights, double kappa_m, double kappa_sigma) {
    require(n >= 1, "dimension must be >= 1");
    require(!weights.empty(), "weights must be non-empty");
    require(kappa_m > 0.0 && std::isfinite(kappa_m), "kappa_m must be positive");
    require(kappa_sigma > 0.0 && std::isfinite(kappa_sigma), "kappa_sigma must be positive");
    double abs_sum = 0.0;
    double sq_sum = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        require(std::isfinite(weights[i]), "weights must be finite");
        require(i == 0 || weights[i] <= weights[i - 1], "weights must be non-increasing");
        abs_sum += std::abs(weights[i]);
        sq_sum += weights[i] * weights[i];
    }
    require(std::abs(abs_sum - 1.0) <= 1e-12, "weights must satisfy sum |w_i| = 1");

    CommaEsParams params;
    params.kappa_m = kappa_m;
    params.kappa_sigma = kappa_sigma;
    params.weights = std::move(weights);
    params.mu_w = 1.0 / sq_sum;
    params.chi_mean = algorithms::chi_mean(n);
    return params;
}

SaParams SaParams::make(Eigen::Index n, std::size_t p, std::optional<double> tau) {
    require(n >= 1, "dimension must be >= 1");
    require(p >= 1, "population must be >= 1");
    SaParams params;
    params.p = p;
    params.tau = tau.value_or(1.0 / std::sqrt(static_cast<double>(n)));
    require(params.tau >= 0.0 && std::isfinite(params.tau), "tau must be non-negative");
    return params;
}

OnePlusOneParams OnePlusOneParams::make(double kappa_sigma, double p_target) {
    require(kappa_sigma > 0.0 && std::isfinite(kappa_sigma), "kappa_sigma must be positive");
    require(p_target > 0.0 && p_target < 1.0, "p_target must lie in (0, 1)");
    OnePlusOneParams params;
    params.gamma = std::exp(kappa_sigma);
    params.q = (1.0 - p_target) / p_target;
    return params;
}

std::size_t default_population(Eigen::Index n) {
    require(n >= 1, "dimension must be >= 1");
    return 4 + static_cast<std::size_t>(std::floor(3.0 * std::log(static_cast<double>(n))));
}

std::vector<double> default_weights(std::size_t p) {
    require(p >= 2, "default_weights needs p >= 2");
    const std::size_t mu = p / 2;
    std::vector<double> w(p, 0.0);
    double total = 0.0;
    for (std::size_t i = 1; i <= mu; ++i) {
        w[i - 1] = std::log(static_cast<double>(p) / 2.0 + 0.5) - std::log(static_cast<double>(i));
        total += w[i - 1];
    }
    for (auto& wi : w) {
        wi /= total;
    }
    return w;
}

double chi_mean(Eigen::Index n) {
    require(n >= 1, "chi_mean needs n >= 1");
    const double dn = static_cast<double>(n);
    return std::sqrt(2.0) * std::exp(std::lgamma((dn + 1.0) / 2.0) - std::lgamma(dn / 2.0));
}

const std::vector<std::string_view>& algorithm_names() {
    static const std::vector<std::string_view> names{"csa", "xnes", "sa", "oneplusone", "constant"};
    return names;
}

}  // namespace cbsars::algorithms
