#include "cbsars/invariance.hpp"

#include <atomic>
#include <cmath>
#include <map>
#include <sstream>
#include <thread>

#include "cbsars/chain.hpp"
#include "cbsars/multiprecision.hpp"

namespace cbsars::invariance {

std::string PairedRunReport::describe() const {
    std::ostringstream out;
    out.precision(3);
    out << (pass() ? "pass" : "FAIL") << " horizon=" << horizon << " tol=" << tolerance
        << " max_x_dev=" << max_x_deviation << " max_sigma_dev=" << max_sigma_deviation;
    if (error) {
        out << " error=\"" << *error << "\"";
    }
    if (fail_t) {
        out.precision(17);
        out << " first_divergence_t=" << *fail_t << " sigma_a=" << state_a->sigma << " sigma_b=" << state_b->sigma
            << " x_a=[" << state_a->x.transpose() << "] x_b=[" << state_b->x.transpose() << "]";
    }
    return out.str();
}

bool is_power_of_two(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        return false;
    }
    int exp = 0;
    return std::frexp(alpha, &exp) == 0.5;
}

std::string SuiteCase::label() const {
    std::ostringstream out;
    out << algorithm << " ";
    switch (kind) {
        case Kind::monotone:
            out << "monotone " << transform << " vs identity on " << objective;
            break;
        case Kind::translation:
            out << "translation by " << offset << "*(1..1) on " << transform << "@" << objective;
            break;
        case Kind::scale:
            out << "scale by " << alpha << " on " << transform << "@" << objective;
            break;
    }
    return out.str();
}

std::vector<SuiteCase> standard_suite() {
    std::vector<SuiteCase> cases;
    for (const char* alg : {"csa", "xnes", "sa", "oneplusone"}) {
        for (const char* obj : {"sphere", "quad:ellipsoid", "pnorm:1", "linear"}) {
            for (const char* g : {"identity", "g^{1/4}", "arctan"}) {
                cases.push_back({alg, obj, g, SuiteCase::Kind::monotone});
                cases.push_back({alg, obj, g, SuiteCase::Kind::translation, 1.0, 1.0});
                for (const double alpha : {0.0625, 3.0, 1024.0}) {
                    cases.push_back({alg, obj, g, SuiteCase::Kind::scale, alpha});
                }
            }
        }
    }
    return cases;
}

bool exact_in_double(const SuiteCase& c) {
    if (c.kind == SuiteCase::Kind::monotone) {
        return c.transform == "identity";
    }
    return c.kind == SuiteCase::Kind::scale && is_power_of_two(c.alpha);
}

namespace {

double run_depth(const std::string& algorithm, const std::string& objective, Eigen::Index n,
                 const PairedRunSetup& setup) {
    const auto spec = algorithms::make_algorithm<double>(algorithm, n);
    const auto f = objectives::make_objective<double>(objective, n);
    chain::TrajectoryOptions options;
    options.max_evals = setup.horizon * spec.evals_per_iteration;
    RngStream rng(setup.seed);
    const auto traj = chain::run_trajectory(setup.start, spec, f, options, rng);
    const auto& first = traj.records.front();
    double depth = 0.0;
    for (const auto& r : traj.records) {
        depth = std::max(
            {depth, std::abs(std::log(r.sigma / first.sigma)), std::abs(std::log(r.x_norm / first.x_norm))});
    }
    return depth;
}

unsigned digits_for_case(const SuiteCase& c, double depth, Eigen::Index n, double tolerance) {
    // Half again the measured depth covers run-to-run variation of the
    // trajectory and the 1/f^2 resolution arctan needs on a diverging linear f.
    double nats = 1.5 * depth;
    if (c.kind == SuiteCase::Kind::translation) {
        nats += std::log1p(std::abs(c.offset) * std::sqrt(static_cast<double>(n)));
    }
    return digits_for_depth(nats, tolerance);
}

template <unsigned Digits>
bool try_tier(const SuiteCase& c, Eigen::Index n, const PairedRunSetup& setup, unsigned needed, SuiteResult& out) {
    if (needed > Digits) {
        return false;
    }
    out.report = run_case<FixedPrecision<Digits>>(c, n, setup);
    out.digits = Digits;
    return true;
}

}  // namespace

unsigned case_precision(const SuiteCase& c, Eigen::Index n, const PairedRunSetup& setup, double tolerance) {
    return digits_for_case(c, run_depth(c.algorithm, c.objective, n, setup), n, tolerance);
}

std::vector<SuiteResult> run_suite(const std::vector<SuiteCase>& cases, Eigen::Index n, const PairedRunSetup& setup,
                                   unsigned threads) {
    std::map<std::pair<std::string, std::string>, double> depth;
    std::vector<unsigned> needed(cases.size(), 0);
    for (std::size_t i = 0; i < cases.size(); ++i) {
        if (exact_in_double(cases[i])) {
            continue;
        }
        const auto key = std::pair{cases[i].algorithm, cases[i].objective};
        auto it = depth.find(key);
        if (it == depth.end()) {
            it = depth.emplace(key, run_depth(key.first, key.second, n, setup)).first;
        }
        needed[i] = digits_for_case(cases[i], it->second, n, 1e-10);
    }

    std::vector<SuiteResult> results(cases.size());
    std::vector<std::size_t> dynamic;  // beyond the largest fixed tier
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < cases.size(); i = next++) {
            auto& r = results[i];
            r.which = cases[i];
            try {
                if (needed[i] == 0) {
                    r.report = run_case<double>(cases[i], n, setup);
                } else if (!try_tier<64>(cases[i], n, setup, needed[i], r) &&
                           !try_tier<128>(cases[i], n, setup, needed[i], r) &&
                           !try_tier<192>(cases[i], n, setup, needed[i], r) &&
                           !try_tier<320>(cases[i], n, setup, needed[i], r)) {
                    r.digits = needed[i];
                }
            } catch (const std::exception& e) {
                r.report.horizon = setup.horizon;
                r.report.error = e.what();
            }
        }
    };
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < threads; ++k) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& th : pool) {
        th.join();
    }

    // The dynamic type's precision is process-wide, so these run one at a time.
    for (std::size_t i = 0; i < cases.size(); ++i) {
        auto& r = results[i];
        if (r.digits <= 320 || r.report.error) {
            continue;
        }
        PrecisionScope scope(r.digits);
        try {
            r.report = run_case<HighPrecision>(cases[i], n, setup);
        } catch (const std::exception& e) {
            r.report.horizon = setup.horizon;
            r.report.error = e.what();
        }
    }
    return results;
}

}  // namespace cbsars::invariance
