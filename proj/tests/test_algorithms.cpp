#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cbsars/algorithms.hpp"
#include "cbsars/multiprecision.hpp"

using namespace cbsars;
using namespace cbsars::algorithms;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (const double x : v) {
        out(i++) = x;
    }
    return out;
}

SampleBlock single(const Vector& y1, std::size_t p = 1) {
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(y1.size(), static_cast<Eigen::Index>(p));
    u.col(0) = y1;
    return SampleBlock(u);
}

std::vector<double> one_hot(std::size_t p) {
    std::vector<double> w(p, 0.0);
    w[0] = 1.0;
    return w;
}

}  // namespace

TEST(SolEs, Examples) {
    EXPECT_EQ(sol_es<double>(AlgorithmState(Vector::Zero(3), 1.0), vec({1, 0, 0})), vec({1, 0, 0}));
    EXPECT_EQ(sol_es<double>(AlgorithmState(vec({1, 1}), 2.0), vec({0.5, -0.5})), vec({2, 0}));
    EXPECT_EQ(sol_es<double>(AlgorithmState(vec({3, -4}), 7.0), Vector::Zero(2)), vec({3, -4}));
}

TEST(GCommaCsa, ExponentZeroKeepsSigma) {
    const Eigen::Index n = 4;
    const auto params = CommaEsParams::make(n, default_weights(4));
    // sum w_i y^i = y^1 * w_1 (other coordinates zero), scaled to the neutral length.
    const double len = params.chi_mean / std::sqrt(params.mu_w) / params.weights[0];
    Vector y1 = Vector::Zero(n);
    y1(2) = len;
    const auto next = g_comma_csa<double>(AlgorithmState(Vector::Zero(n), 2.0), single(y1, 4), params);
    EXPECT_NEAR(next.sigma, 2.0, 1e-14);
}

TEST(GCommaCsa, ZeroRecombinationShrinks) {
    const Eigen::Index n = 5;
    const auto params = CommaEsParams::make(n, default_weights(6), 1.0, 0.8);
    const AlgorithmState s(vec({1, 2, 3, 4, 5}), 1.5);
    const auto next = g_comma_csa<double>(s, SampleBlock(Eigen::MatrixXd::Zero(n, 6)), params);
    EXPECT_EQ(next.x, s.x);
    EXPECT_DOUBLE_EQ(next.sigma, 1.5 * std::exp(-0.8));
}

TEST(GCommaCsa, DoubleLengthMultipliesByE) {
    const Eigen::Index n = 10;
    const auto params = CommaEsParams::make(n, one_hot(3));
    EXPECT_DOUBLE_EQ(params.mu_w, 1.0);
    Vector y1 = Vector::Zero(n);
    y1(0) = 2.0 * chi_mean(n);
    const auto next = g_comma_csa<double>(AlgorithmState(Vector::Zero(n), 1.0), single(y1, 3), params);
    EXPECT_NEAR(next.sigma, std::numbers::e, 1e-14);
    EXPECT_TRUE(next.x.isApprox(y1));
}

TEST(GCommaXnes, NeutralNormsKeepSigma) {
    const Eigen::Index n = 4;
    const auto params = CommaEsParams::make(n, default_weights(4));
    Eigen::MatrixXd u(n, 4);
    u.setConstant(1.0);  // ||y^i||^2 = n
    const auto next = g_comma_xnes<double>(AlgorithmState(Vector::Zero(n), 3.0), SampleBlock(u), params);
    EXPECT_DOUBLE_EQ(next.sigma, 3.0);
}

TEST(GCommaXnes, TripleSquaredNormMultipliesByE) {
    const Eigen::Index n = 6;
    const auto params = CommaEsParams::make(n, one_hot(2));
    Vector y1 = Vector::Zero(n);
    y1(0) = std::sqrt(3.0 * n);
    const auto next = g_comma_xnes<double>(AlgorithmState(Vector::Zero(n), 1.0), single(y1, 2), params);
    EXPECT_NEAR(next.sigma, std::numbers::e, 1e-14);
}

TEST(GCommaXnes, MatchesMultiprecisionRecomputation) {
    const Eigen::Index n = 10;
    const auto w = default_weights(10);
    const auto params = CommaEsParams::make(n, w, 1.0, 0.5);
    RngStream rng(2024);
    Eigen::MatrixXd u(n, 10);
    for (Eigen::Index j = 0; j < 10; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            u(i, j) = rng.normal();
        }
    }
    const double sigma = 0.37;
    const double got = sigma_xnes<double>(sigma, SampleBlock(u), params);

    // Independent scalar evaluation of sigma * exp(kappa / (2n) * sum_i w_i (||y^i||^2 - n)).
    PrecisionScope scope(50);
    HighPrecision acc = 0;
    for (std::size_t i = 0; i < 10; ++i) {
        HighPrecision sq = 0;
        for (Eigen::Index k = 0; k < n; ++k) {
            sq += HighPrecision(u(k, static_cast<Eigen::Index>(i))) * HighPrecision(u(k, static_cast<Eigen::Index>(i)));
        }
        acc += HighPrecision(w[i]) * (sq - HighPrecision(10));
    }
    const HighPrecision want = HighPrecision(sigma) * exp(HighPrecision(0.5) / HighPrecision(20) * acc);
    EXPECT_NEAR(got / static_cast<double>(want), 1.0, 1e-14);
}

TEST(SolSa, Examples) {
    const AlgorithmState s(vec({1.0, -2.0}), 0.5);
    EXPECT_EQ(sol_sa<double>(s, vec({0.3, 0.4, 0.0}), 0.7), sol_es<double>(s, vec({0.3, 0.4})));
    EXPECT_EQ(sol_sa<double>(s, vec({0.3, 0.4, 1.9}), 0.0), sol_es<double>(s, vec({0.3, 0.4})));
    const auto x = sol_sa<double>(AlgorithmState(Vector::Zero(3), 1.0), vec({1, 0, 0, std::log(2.0)}), 1.0);
    EXPECT_NEAR(x(0), 2.0, 1e-15);
    EXPECT_EQ(x(1), 0.0);
}

TEST(GSa, Examples) {
    const Eigen::Index n = 3;
    const auto params = SaParams::make(n, 5);
    EXPECT_DOUBLE_EQ(params.tau, 1.0 / std::sqrt(3.0));
    const AlgorithmState s(vec({1, 2, 3}), 2.0);
    EXPECT_DOUBLE_EQ(g_sa<double>(s, single(vec({0.1, 0.2, 0.3, 0.0}), 5), params).sigma, 2.0);
    const double lift = std::log(2.0) / params.tau;
    const auto next = g_sa<double>(s, single(vec({0.1, 0.2, 0.3, lift}), 5), params);
    EXPECT_NEAR(next.sigma, 4.0, 1e-14);
    EXPECT_TRUE(((next.x - s.x) / next.sigma).isApprox(vec({0.1, 0.2, 0.3}), 1e-14));
}

TEST(GOnePlusOne, Branches) {
    const auto params = OnePlusOneParams::make();
    EXPECT_NEAR(params.gamma, 1.395612, 1e-6);
    EXPECT_NEAR(params.failure_factor(), 0.920044, 1e-6);
    EXPECT_DOUBLE_EQ(params.q, 4.0);
    const AlgorithmState s(vec({1.0, 1.0}), 0.5);
    Eigen::MatrixXd succ = Eigen::MatrixXd::Zero(2, 2);
    succ(0, 0) = -0.25;
    const auto up = g_oneplusone<double>(s, SampleBlock(succ), params);
    EXPECT_DOUBLE_EQ(up.sigma, 0.5 * params.gamma);
    EXPECT_EQ(up.x, vec({0.875, 1.0}));
    const auto down = g_oneplusone<double>(s, SampleBlock(Eigen::MatrixXd::Zero(2, 2)), params);
    EXPECT_DOUBLE_EQ(down.sigma, 0.5 * params.failure_factor());
    EXPECT_EQ(down.x, s.x);
}

TEST(RankPlus, StrictImprovementOnly) {
    std::vector<double> better{0.5, 1.0};
    std::vector<double> tie{1.0, 1.0};
    std::vector<double> worse{2.0, 1.0};
    EXPECT_EQ(rank_plus<double>(better).indices(), (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(rank_plus<double>(tie).indices(), (std::vector<std::size_t>{1, 0}));
    EXPECT_EQ(rank_plus<double>(worse).indices(), (std::vector<std::size_t>{1, 0}));
}

TEST(DefaultWeights, Examples) {
    EXPECT_EQ(default_weights(2), (std::vector<double>{1.0, 0.0}));
    const auto w = default_weights(10);
    // ln(5.5) - ln i over their sum 3.73625
    const double want[] = {0.45627, 0.27075, 0.16223, 0.08523, 0.02551, 0, 0, 0, 0, 0};
    for (int i = 0; i < 10; ++i) {
        EXPECT_NEAR(w[static_cast<std::size_t>(i)], want[i], 5e-6) << i;
    }
    EXPECT_THROW(default_weights(1), InvalidInput);
    EXPECT_THROW(default_weights(0), InvalidInput);
}

TEST(DefaultWeights, NormalizedAndNonIncreasing) {
    for (std::size_t p = 2; p <= 64; ++p) {
        const auto w = default_weights(p);
        double sum = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
            sum += std::abs(w[i]);
            if (i > 0) {
                EXPECT_LE(w[i], w[i - 1]);
            }
        }
        EXPECT_NEAR(sum, 1.0, 1e-12) << p;
    }
}

TEST(ChiMean, ClosedForms) {
    EXPECT_NEAR(chi_mean(1), std::sqrt(2.0 / std::numbers::pi), 1e-14);
    EXPECT_NEAR(chi_mean(2), std::sqrt(std::numbers::pi / 2.0), 1e-14);
    // sqrt(2) * Gamma(5.5) / Gamma(5) with Gamma(5.5) = 29.53125 sqrt(pi).
    EXPECT_NEAR(chi_mean(10), std::sqrt(2.0) * 29.53125 * std::sqrt(std::numbers::pi) / 24.0, 1e-12);
    EXPECT_NEAR(chi_mean(10), 3.08432, 1e-5);
    EXPECT_THROW(chi_mean(0), InvalidInput);
}

TEST(ChiMean, LargeDimensionApproachesSqrtN) {
    const double n = 10000.0;
    EXPECT_NEAR(chi_mean(10000), std::sqrt(n) * (1.0 - 1.0 / (4.0 * n)), 1e-6);
}

TEST(Params, Validation) {
    EXPECT_THROW(CommaEsParams::make(3, {0.2, 0.8}), InvalidInput);  // increasing
    EXPECT_THROW(CommaEsParams::make(3, {0.5, 0.4}), InvalidInput);  // sum 0.9
    EXPECT_THROW(CommaEsParams::make(3, {1.0}, 0.0), InvalidInput);
    EXPECT_THROW(CommaEsParams::make(3, {1.0}, 1.0, -1.0), InvalidInput);
    const auto neg = CommaEsParams::make(3, {0.75, -0.25});
    EXPECT_DOUBLE_EQ(neg.mu_w, 1.0 / (0.5625 + 0.0625));
    EXPECT_THROW(OnePlusOneParams::make(0.0), InvalidInput);
    EXPECT_THROW(OnePlusOneParams::make(0.3, 1.0), InvalidInput);
    EXPECT_THROW(SaParams::make(3, 0), InvalidInput);
    EXPECT_THROW(SaParams::make(3, 4, -1.0), InvalidInput);
}

TEST(Registry, NamesAndSizes) {
    EXPECT_EQ(default_population(10), 10u);
    EXPECT_EQ(default_population(2), 6u);
    EXPECT_EQ(default_population(1), 4u);
    for (const auto name : algorithm_names()) {
        const auto spec = make_algorithm(name, 10);
        EXPECT_EQ(spec.name, name);
        EXPECT_EQ(spec.n, 10);
        RngStream rng(1);
        const auto u = spec.sampler(rng);
        EXPECT_EQ(u.size(), spec.p);
        EXPECT_EQ(u.dim(), spec.m);
    }
    EXPECT_EQ(make_algorithm("sa", 10).m, 11);
    EXPECT_EQ(make_algorithm("csa", 10).evals_per_iteration, 10u);
    EXPECT_EQ(make_algorithm("oneplusone", 10).evals_per_iteration, 1u);
    EXPECT_THROW(make_algorithm("cma", 10), InvalidInput);
    EXPECT_THROW(make_algorithm("csa", 0), InvalidInput);
    AlgorithmOptions opt;
    opt.p = 20;
    EXPECT_EQ(make_algorithm("xnes", 10, opt).p, 20u);
}

TEST(Registry, PlusSamplerHasZeroSecondCoordinate) {
    const auto spec = make_algorithm("oneplusone", 5);
    RngStream rng(9);
    const auto u = spec.sampler(rng);
    EXPECT_EQ(u.size(), 2u);
    EXPECT_TRUE(u.coord(1).isZero(0));
    EXPECT_FALSE(u.coord(0).isZero(0));
}
