// Randomized properties over many seeded draws.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cbsars/algorithms.hpp"
#include "cbsars/objectives.hpp"

using namespace cbsars;

namespace {

const char* const kAlgorithms[] = {"csa", "xnes", "sa", "oneplusone"};

Vector normal_vector(Eigen::Index n, RngStream& rng, double scale = 1.0) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v(i) = scale * rng.normal();
    }
    return v;
}

AlgorithmState random_state(Eigen::Index n, RngStream& rng) {
    return AlgorithmState(normal_vector(n, rng, 5.0), std::exp(6.0 * (rng.uniform() - 0.5)));
}

double rel_dev(const Vector& a, const Vector& b) {
    const double scale = std::max(a.norm(), b.norm());
    return scale > 0 ? (a - b).norm() / scale : 0.0;
}

SampleBlock permute_columns(const SampleBlock& u, const std::vector<std::size_t>& perm) {
    Eigen::MatrixXd m(u.dim(), static_cast<Eigen::Index>(u.size()));
    for (std::size_t k = 0; k < perm.size(); ++k) {
        m.col(static_cast<Eigen::Index>(k)) = u.coord(perm[k]);
    }
    return SampleBlock(m);
}

}  // namespace

TEST(CoreProperties, StepIsDeterministic) {
    const Eigen::Index n = 6;
    const auto f = objectives::make_objective("quad:ellipsoid", n).fn();
    RngStream rng(1);
    for (const auto name : kAlgorithms) {
        const auto spec = algorithms::make_algorithm(name, n);
        for (int k = 0; k < 100; ++k) {
            const auto s = random_state(n, rng);
            const auto u = spec.sampler(rng);
            const auto a = step(s, u, spec, f);
            const auto b = step(s, u, spec, f);
            EXPECT_EQ(a.x, b.x);
            EXPECT_EQ(a.sigma, b.sigma);
        }
    }
}

TEST(CoreProperties, StepSizeUpdateIgnoresX) {
    const Eigen::Index n = 5;
    RngStream rng(2);
    for (const auto name : kAlgorithms) {
        const auto spec = algorithms::make_algorithm(name, n);
        for (int k = 0; k < 100; ++k) {
            const auto y = spec.sampler(rng);
            const double sigma = std::exp(rng.normal());
            const auto a = update(AlgorithmState(normal_vector(n, rng), sigma), y, spec);
            const auto b = update(AlgorithmState(normal_vector(n, rng, 100.0), sigma), y, spec);
            EXPECT_EQ(a.sigma, b.sigma) << name;
        }
    }
}

TEST(CoreProperties, OrdSortsValues) {
    RngStream rng(3);
    for (int k = 0; k < 500; ++k) {
        const std::size_t p = 1 + static_cast<std::size_t>(rng.uniform() * 20);
        std::vector<double> v(p);
        for (auto& x : v) {
            // coarse values so that ties occur
            x = std::round(4.0 * rng.normal());
        }
        const auto s = ord<double>(v);
        std::vector<double> permuted(p);
        for (std::size_t i = 0; i < p; ++i) {
            permuted[i] = v[s[i]];
        }
        std::vector<double> sorted = v;
        std::stable_sort(sorted.begin(), sorted.end());
        EXPECT_EQ(permuted, sorted);
        for (std::size_t i = 1; i < p; ++i) {
            if (permuted[i] == permuted[i - 1]) {
                EXPECT_LT(s[i - 1], s[i]);  // stable
            }
        }
    }
}

TEST(CoreProperties, BlockExchangeability) {
    const Eigen::Index n = 7;
    const auto f = objectives::make_objective("pnorm:1", n).fn();
    RngStream rng(4);
    for (const auto name : kAlgorithms) {
        const auto spec = algorithms::make_algorithm(name, n);
        for (int k = 0; k < 100; ++k) {
            const auto s = random_state(n, rng);
            const auto u = spec.sampler(rng);
            std::vector<std::size_t> perm(spec.p);
            std::iota(perm.begin(), perm.end(), 0);
            for (std::size_t i = perm.size(); i > 1; --i) {
                std::swap(perm[i - 1], perm[static_cast<std::size_t>(rng.uniform() * static_cast<double>(i))]);
            }
            const auto a = step(s, u, spec, f);
            const auto b = step(s, permute_columns(u, perm), spec, f);
            EXPECT_EQ(a.x, b.x) << name;
            EXPECT_EQ(a.sigma, b.sigma) << name;
        }
    }
}

TEST(AlgorithmProperties, StepSizeStaysPositive) {
    const Eigen::Index n = 10;
    RngStream rng(5);
    for (const auto name : kAlgorithms) {
        const auto spec = algorithms::make_algorithm(name, n);
        for (int k = 0; k < 300; ++k) {
            // up to 10x the sampling scale; far beyond that exp() itself under- or overflows
            const double spread = std::pow(10.0, rng.uniform());
            Eigen::MatrixXd m(spec.m, static_cast<Eigen::Index>(spec.p));
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                m.col(j) = normal_vector(spec.m, rng, spread);
            }
            if (std::string(name) == "oneplusone" && k % 2 == 0) {
                m.col(0).setZero();
            }
            const double out = spec.g2(1.0, SampleBlock(m));
            EXPECT_GT(out, 0.0) << name;
            EXPECT_TRUE(std::isfinite(out)) << name;
        }
    }
}

TEST(AlgorithmProperties, TranslationSufficientConditions) {
    const Eigen::Index n = 8;
    RngStream rng(6);
    for (const auto name : kAlgorithms) {
        const auto spec = algorithms::make_algorithm(name, n);
        for (int k = 0; k < 200; ++k) {
            const auto s = random_state(n, rng);
            const Vector x0 = normal_vector(n, rng, 10.0);
            const AlgorithmState shifted(s.x + x0, s.sigma);
            const auto y = spec.sampler(rng);
            for (std::size_t i = 0; i < y.size(); ++i) {
                EXPECT_LE(rel_dev(spec.sol(shifted, y.coord(i)), spec.sol(s, y.coord(i)) + x0), 1e-9) << name;
            }
            EXPECT_LE(rel_dev(spec.g1(shifted, y), spec.g1(s, y) + x0), 1e-9) << name;
        }
    }
}

TEST(AlgorithmProperties, ScaleSufficientConditionsExactForPowersOfTwo) {
    const Eigen::Index n = 8;
    RngStream rng(7);
    for (const auto name : kAlgorithms) {
        const auto spec = algorithms::make_algorithm(name, n);
        for (int kexp = -8; kexp <= 8; ++kexp) {
            const double alpha = std::ldexp(1.0, kexp);
            for (int k = 0; k < 20; ++k) {
                const auto s = random_state(n, rng);
                const AlgorithmState scaled(s.x / alpha, s.sigma / alpha);
                const auto y = spec.sampler(rng);
                for (std::size_t i = 0; i < y.size(); ++i) {
                    EXPECT_EQ(spec.sol(s, y.coord(i)), Vector(alpha * spec.sol(scaled, y.coord(i)))) << name;
                }
                EXPECT_EQ(spec.g1(s, y), Vector(alpha * spec.g1(scaled, y))) << name;
                EXPECT_EQ(spec.g2(s.sigma, y), alpha * spec.g2(s.sigma / alpha, y)) << name;
            }
        }
    }
}

TEST(AlgorithmProperties, ElitistFitnessNeverIncreases) {
    const Eigen::Index n = 10;
    for (const char* obj : {"sphere", "quad:ellipsoid", "pnorm:1", "linear"}) {
        const auto f = objectives::make_objective(obj, n).fn();
        for (const char* name : {"oneplusone", "constant"}) {
            const auto spec = algorithms::make_algorithm(name, n);
            RngStream rng(8);
            AlgorithmState s(Vector::Constant(n, 0.8), 1.0);
            double prev = f(s.x);
            for (int t = 0; t < 2000; ++t) {
                s = step(s, spec.sampler(rng), spec, f);
                const double now = f(s.x);
                ASSERT_LE(now, prev) << name << " " << obj << " t=" << t;
                prev = now;
            }
        }
    }
}

TEST(AlgorithmProperties, SelfAdaptationIdentities) {
    const Eigen::Index n = 6;
    const auto spec = algorithms::make_algorithm("sa", n);
    const double tau = algorithms::SaParams::make(n, spec.p).tau;
    const auto f = objectives::make_objective("quad:ellipsoid", n).fn();
    RngStream rng(9);
    AlgorithmState s(Vector::Constant(n, 0.8), 1.0);
    for (int t = 0; t < 500; ++t) {
        const auto y = select(s, spec.sampler(rng), spec, f);
        const auto next = update(s, y, spec);
        EXPECT_NEAR(next.sigma / s.sigma, std::exp(tau * y.coord(0)(n)), 1e-12 * next.sigma / s.sigma);
        EXPECT_LE(rel_dev((next.x - s.x) / next.sigma, y.coord(0).head(n)), 1e-9);
        s = next;
    }
}

TEST(ObjectiveProperties, CompositesStayScalingInvariant) {
    const Eigen::Index n = 5;
    for (const char* base : {"sphere", "quad:ellipsoid", "pnorm:1", "pnorm:3", "linear"}) {
        for (const char* g : {"identity", "g^{1/4}", "arctan"}) {
            RngStream rng(10);
            const auto f = objectives::make_objective(std::string(g) + "@" + base, n);
            const auto report = objectives::check_scaling_invariance(f, 1000, objectives::default_rho_grid(), rng);
            EXPECT_TRUE(report.consistent()) << g << "@" << base;
        }
    }
}

TEST(ObjectiveProperties, RefutationsReproduce) {
    const Eigen::Index n = 3;
    const auto f = objectives::make_objective("sphere+linear", n);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        RngStream rng(seed);
        const auto report = objectives::check_scaling_invariance(f, 1000, objectives::default_rho_grid(), rng);
        if (!report.consistent()) {
            EXPECT_TRUE(objectives::flips_ordering(f, *report.witness)) << seed;
        }
    }
}
