#include "cbsars/objectives.hpp"

#include <charconv>
#include <sstream>

namespace cbsars::objectives {

namespace {

double parse_double(std::string_view text, std::string_view what) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || text.empty()) {
        std::ostringstream msg;
        msg << "cannot parse " << what << " from '" << text << "'";
        throw InvalidInput(msg.str());
    }
    return value;
}

constexpr std::string_view kCompose = "\xE2\x88\x98";  // U+2218 RING OPERATOR

}  // namespace

Vector ellipsoid_spectrum(Eigen::Index n, double condition) {
    if (n < 1 || !(condition >= 1.0)) {
        throw InvalidInput("ellipsoid: need n >= 1 and condition >= 1");
    }
    Vector lambda(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        lambda(i) = n == 1 ? 1.0 : std::pow(condition, static_cast<double>(i) / static_cast<double>(n - 1));
    }
    return lambda;
}

ObjectiveDescriptor parse_objective(std::string_view name, Eigen::Index n) {
    if (n < 1) {
        throw InvalidInput("objective dimension must be >= 1");
    }
    ObjectiveDescriptor d;
    for (;;) {
        auto split = name.find(kCompose);
        std::size_t sep_len = kCompose.size();
        if (split == std::string_view::npos) {
            split = name.find('@');
            sep_len = 1;
        }
        if (split == std::string_view::npos) {
            break;
        }
        const auto g = name.substr(0, split);
        if (g == "g^{1/4}" || g == "quarter") {
            d.transforms.emplace_back("g^{1/4}");
        } else if (g == "arctan" || g == "identity") {
            d.transforms.emplace_back(g);
        } else {
            throw InvalidInput("unknown transform '" + std::string(g) + "'");
        }
        name = name.substr(split + sep_len);
    }

    d.base_label = std::string(name);
    if (name == "sphere") {
        d.kind = ObjectiveDescriptor::Kind::sphere;
    } else if (name == "linear") {
        d.kind = ObjectiveDescriptor::Kind::linear;
    } else if (name == "sphere+linear") {
        d.kind = ObjectiveDescriptor::Kind::tilted_sphere;
    } else if (name.starts_with("pnorm:")) {
        d.kind = ObjectiveDescriptor::Kind::pnorm;
        d.exponent = parse_double(name.substr(6), "pnorm exponent");
        if (!(d.exponent > 0.0)) {
            throw InvalidInput("pnorm: p must be positive");
        }
    } else if (name.starts_with("quad:")) {
        d.kind = ObjectiveDescriptor::Kind::quadratic;
        const auto spec = name.substr(5);
        if (spec.starts_with("ellipsoid")) {
            double cond = 1e6;
            if (spec.size() > 9) {
                if (spec[9] != ':') {
                    throw InvalidInput("quad:ellipsoid takes an optional ':<condition>'");
                }
                cond = parse_double(spec.substr(10), "ellipsoid condition");
            }
            const Vector lambda = ellipsoid_spectrum(n, cond);
            d.spectrum.assign(lambda.data(), lambda.data() + lambda.size());
        } else {
            std::size_t start = 0;
            while (start <= spec.size()) {
                auto comma = spec.find(',', start);
                if (comma == std::string_view::npos) {
                    comma = spec.size();
                }
                d.spectrum.push_back(parse_double(spec.substr(start, comma - start), "quadratic spectrum"));
                start = comma + 1;
            }
            if (static_cast<Eigen::Index>(d.spectrum.size()) != n) {
                throw InvalidInput("quadratic spectrum must list exactly n eigenvalues");
            }
        }
        for (const double l : d.spectrum) {
            if (!(l > 0.0) || !std::isfinite(l)) {
                throw InvalidInput("quadratic: spectrum must be positive (H must be positive definite)");
            }
        }
    } else {
        throw InvalidInput("unknown objective '" + std::string(name) + "'");
    }
    return d;
}

std::vector<double> default_rho_grid() {
    std::vector<double> grid;
    for (int k = -4; k <= 4; ++k) {
        grid.push_back(std::ldexp(1.0, k));
    }
    return grid;
}

bool flips_ordering(const Objective& f, const Witness& w) {
    const Vector dx = w.x - f.reference();
    const Vector dy = w.y - f.reference();
    const bool base_le = f.centered(dx) <= f.centered(dy);
    const bool scaled_le = f.centered(w.rho * dx) <= f.centered(w.rho * dy);
    return base_le != scaled_le;
}

InvarianceReport check_scaling_invariance(const Objective& f, int trials, const std::vector<double>& rho_grid,
                                          RngStream& rng) {
    if (trials < 1) {
        throw InvalidInput("check_scaling_invariance: trials must be >= 1");
    }
    for (const double rho : rho_grid) {
        if (!(rho > 0.0)) {
            throw InvalidInput("check_scaling_invariance: scales must be positive");
        }
    }
    InvarianceReport report;
    const Eigen::Index n = f.dim();
    for (int t = 0; t < trials; ++t) {
        Witness w;
        w.x = f.reference();
        w.y = f.reference();
        for (Eigen::Index i = 0; i < n; ++i) {
            w.x(i) += rng.normal();
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            w.y(i) += rng.normal();
        }
        report.trials = t + 1;
        for (const double rho : rho_grid) {
            w.rho = rho;
            if (flips_ordering(f, w)) {
                report.verdict = Verdict::refuted;
                report.witness = w;
                return report;
            }
        }
    }
    return report;
}

bool breaks_homogeneity(const Objective& f, double alpha, const Witness& w) {
    const Vector d = w.x - f.reference();
    const double lhs = f.centered(w.rho * d);
    const double rhs = std::pow(w.rho, alpha) * f.centered(d);
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    return !(std::abs(lhs - rhs) <= 1e-9 * scale);
}

InvarianceReport check_positive_homogeneity(const Objective& f, double alpha, int trials, RngStream& rng) {
    if (trials < 1) {
        throw InvalidInput("check_positive_homogeneity: trials must be >= 1");
    }
    InvarianceReport report;
    const Eigen::Index n = f.dim();
    for (int t = 0; t < trials; ++t) {
        Witness w;
        w.x = f.reference();
        for (Eigen::Index i = 0; i < n; ++i) {
            w.x(i) += rng.normal();
        }
        w.rho = std::exp2(8.0 * rng.uniform() - 4.0);
        report.trials = t + 1;
        if (breaks_homogeneity(f, alpha, w)) {
            report.verdict = Verdict::refuted;
            report.witness = w;
            return report;
        }
    }
    return report;
}

}  // namespace cbsars::objectives
