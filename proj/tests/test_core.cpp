#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "cbsars/algorithms.hpp"
#include "cbsars/core.hpp"
#include "cbsars/objectives.hpp"

using namespace cbsars;

namespace {

std::vector<std::size_t> perm(std::initializer_list<double> values) {
    std::vector<double> v(values);
    return ord(std::span<const double>(v)).indices();
}

SampleBlock block(std::initializer_list<std::initializer_list<double>> cols) {
    const auto p = static_cast<Eigen::Index>(cols.size());
    const auto m = static_cast<Eigen::Index>(cols.begin()->size());
    Eigen::MatrixXd u(m, p);
    Eigen::Index j = 0;
    for (const auto& c : cols) {
        Eigen::Index i = 0;
        for (const double v : c) {
            u(i++, j) = v;
        }
        ++j;
    }
    return SampleBlock(u);
}

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (const double x : v) {
        out(i++) = x;
    }
    return out;
}

}  // namespace

TEST(Ord, SortedInputGivesIdentity) { EXPECT_EQ(perm({1.0, 2.0, 3.0}), (std::vector<std::size_t>{0, 1, 2})); }

TEST(Ord, ThreeOneTwo) {
    // One-based S = (2, 3, 1).
    EXPECT_EQ(perm({3.0, 1.0, 2.0}), (std::vector<std::size_t>{1, 2, 0}));
}

TEST(Ord, TiesKeepOriginalOrder) {
    EXPECT_EQ(perm({1.0, 1.0}), (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(perm({2.0, 1.0, 2.0, 1.0}), (std::vector<std::size_t>{1, 3, 0, 2}));
}

TEST(Ord, RejectsNonFiniteAndEmpty) {
    EXPECT_THROW(perm({1.0, std::numeric_limits<double>::quiet_NaN()}), InvalidInput);
    EXPECT_THROW(perm({std::numeric_limits<double>::infinity()}), InvalidInput);
    std::vector<double> none;
    EXPECT_THROW(ord(std::span<const double>(none)), InvalidInput);
}

TEST(RankingPermutation, RejectsNonBijection) {
    EXPECT_THROW(RankingPermutation({0, 0}), InvalidInput);
    EXPECT_THROW(RankingPermutation({0, 2}), InvalidInput);
    EXPECT_NO_THROW(RankingPermutation({2, 0, 1}));
}

TEST(ApplyPermutation, Examples) {
    const auto u = block({{1.0}, {2.0}, {3.0}});
    EXPECT_EQ(apply_permutation(RankingPermutation::identity(3), u), u);
    const auto swapped = apply_permutation(RankingPermutation({1, 0}), block({{1.0}, {2.0}}));
    EXPECT_EQ(swapped, block({{2.0}, {1.0}}));
    EXPECT_EQ(apply_permutation(RankingPermutation({1, 2, 0}), u), block({{2.0}, {3.0}, {1.0}}));
    EXPECT_THROW(apply_permutation(RankingPermutation::identity(2), u), InvalidInput);
}

TEST(AlgorithmState, Invariants) {
    EXPECT_THROW(AlgorithmState(vec({0.0}), 0.0), InvalidInput);
    EXPECT_THROW(AlgorithmState(vec({0.0}), -1.0), InvalidInput);
    EXPECT_THROW(AlgorithmState(vec({0.0}), std::numeric_limits<double>::infinity()), InvalidInput);
    EXPECT_THROW(AlgorithmState(vec({std::nan("")}), 1.0), InvalidInput);
}

TEST(SampleBlock, Shape) {
    const auto u = block({{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}});
    EXPECT_EQ(u.size(), 3u);
    EXPECT_EQ(u.dim(), 2);
    EXPECT_EQ(u.coord(1)(1), 4.0);
}

TEST(Step, OnePlusOneFailureKeepsX) {
    const auto spec = algorithms::make_algorithm("oneplusone", 2);
    const auto f = objectives::sphere<double>(Vector::Zero(2));
    const AlgorithmState s(vec({1.0, 0.0}), 1.0);
    const auto next = step(s, block({{1.0, 0.0}, {0.0, 0.0}}), spec, f.fn());
    EXPECT_EQ(next.x, s.x);
    EXPECT_DOUBLE_EQ(next.sigma, std::exp(-1.0 / 12.0));
}

TEST(Step, OnePlusOneSuccessHandEvaluated) {
    // f(0.5, 0) = 0.25 < f(1, 0) = 1.
    const auto spec = algorithms::make_algorithm("oneplusone", 2);
    const auto f = objectives::sphere<double>(Vector::Zero(2));
    const auto next = step(AlgorithmState(vec({1.0, 0.0}), 1.0), block({{-0.5, 0.0}, {0.0, 0.0}}), spec, f.fn());
    EXPECT_EQ(next.x, vec({0.5, 0.0}));
    EXPECT_DOUBLE_EQ(next.sigma, std::exp(1.0 / 3.0));
}

TEST(Step, CsaWithAllWeightOnFirst) {
    const Eigen::Index n = 3;
    auto params = algorithms::CommaEsParams::make(n, {1.0, 0.0, 0.0}, 0.7, 1.0);
    const auto spec = algorithms::csa_spec(n, params);
    const auto f = objectives::sphere<double>(Vector::Zero(n));
    const AlgorithmState s(vec({5.0, 5.0, 5.0}), 0.5);
    // Already ordered: candidate 1 is closest to the origin.
    const auto u = block({{-1.0, -1.0, -1.0}, {0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}});
    const auto next = step(s, u, spec, f.fn());
    EXPECT_TRUE(next.x.isApprox(s.x + 0.7 * 0.5 * u.coord(0), 1e-15));
}

TEST(Step, NonFiniteObjectiveCarriesPoint) {
    const auto spec = algorithms::make_algorithm("oneplusone", 2);
    ObjectiveFn bad = [](const Vector& x) { return x(0) > 1.5 ? std::nan("") : x.squaredNorm(); };
    try {
        step(AlgorithmState(vec({1.0, 0.0}), 1.0), block({{1.0, 0.0}, {0.0, 0.0}}), spec, bad);
        FAIL() << "expected EvaluationError";
    } catch (const EvaluationError& e) {
        EXPECT_EQ(e.point(), vec({2.0, 0.0}));
    }
}

TEST(Step, BlockShapeIsChecked) {
    const auto spec = algorithms::make_algorithm("csa", 2);
    const auto f = objectives::sphere<double>(Vector::Zero(2));
    EXPECT_THROW(step(AlgorithmState(vec({1.0, 0.0}), 1.0), block({{1.0, 0.0}, {0.0, 0.0}}), spec, f.fn()),
                 InvalidInput);
}

TEST(Rng, SameSeedSameStream) {
    RngStream a(42);
    RngStream b(42);
    for (int i = 0; i < 100; ++i) {
        EXPECT_EQ(a.normal(), b.normal());
    }
    RngStream c = RngStream::derive(42, 0);
    RngStream d = RngStream::derive(42, 1);
    EXPECT_NE(c.seed(), d.seed());
    EXPECT_NE(c.normal(), d.normal());
}

TEST(Rng, UniformInOpenInterval) {
    RngStream r(1);
    for (int i = 0; i < 10000; ++i) {
        const double u = r.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}

TEST(Rng, NormalMoments) {
    RngStream r(3);
    double s = 0.0;
    double s2 = 0.0;
    const int k = 200000;
    for (int i = 0; i < k; ++i) {
        const double z = r.normal();
        s += z;
        s2 += z * z;
    }
    EXPECT_NEAR(s / k, 0.0, 0.01);
    EXPECT_NEAR(s2 / k, 1.0, 0.01);
}
