#pragma once

// Scaling-invariant objective functions and randomized checkers for scaling
// invariance and positive homogeneity.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "cbsars/core.hpp"

namespace cbsars::objectives {

/// f(x) = base(x - reference). The base function sees offsets from the reference point.
template <typename S>
class BasicObjective {
public:
    using Base = std::function<S(const VectorT<S>&)>;

    BasicObjective(std::string label, Base base, VectorT<S> reference)
        : label_(std::move(label)), base_(std::move(base)), reference_(std::move(reference)) {
        if (!base_) {
            throw InvalidInput("objective needs a base function");
        }
        if (reference_.size() < 1 || !all_finite(reference_)) {
            throw InvalidInput("objective reference point must be finite and non-empty");
        }
    }

    S operator()(const VectorT<S>& x) const { return base_(x - reference_); }

    /// base(d) for an offset d from the reference point.
    S centered(const VectorT<S>& d) const { return base_(d); }

    const std::string& label() const noexcept { return label_; }
    const VectorT<S>& reference() const noexcept { return reference_; }
    Eigen::Index dim() const noexcept { return reference_.size(); }

    BasicObjectiveFn<S> fn() const {
        return [base = base_, ref = reference_](const VectorT<S>& x) { return base(x - ref); };
    }
    BasicObjectiveFn<S> centered_fn() const { return base_; }

    /// Same base function around another reference point.
    BasicObjective with_reference(VectorT<S> reference) const { return {label_, base_, std::move(reference)}; }

private:
    std::string label_;
    Base base_;
    VectorT<S> reference_;
};

using Objective = BasicObjective<double>;

/// A named increasing scalar map for composites.
template <typename S>
struct BasicTransform {
    std::string label;
    std::function<S(const S&)> apply;
};

using Transform = BasicTransform<double>;

template <typename S = double>
BasicTransform<S> identity_transform() {
    return {"identity", [](const S& u) { return u; }};
}

/// sign(u) |u|^{1/4}: the fourth root extended to an increasing map on all of R.
template <typename S = double>
BasicTransform<S> quarter_root() {
    return {"g^{1/4}", [](const S& u) {
                using std::abs;
                using std::sqrt;
                const S r = sqrt(sqrt(abs(u)));
                return u < 0 ? S(-r) : r;
            }};
}

template <typename S = double>
BasicTransform<S> arctan_transform() {
    return {"arctan", [](const S& u) {
                using std::atan;
                return atan(u);
            }};
}

/// u + 1: increasing, but destroys positive homogeneity.
template <typename S = double>
BasicTransform<S> shift_by_one() {
    return {"u+1", [](const S& u) { return u + S(1); }};
}

template <typename S = double>
BasicObjective<S> sphere(VectorT<S> x_star) {
    return {"sphere", [](const VectorT<S>& d) { return d.squaredNorm(); }, std::move(x_star)};
}

/// (x - x*)^T H (x - x*). Throws InvalidInput unless H is symmetric positive definite.
template <typename S = double>
BasicObjective<S> quadratic(MatrixT<S> h, VectorT<S> x_star) {
    const Eigen::Index n = x_star.size();
    if (h.rows() != n || h.cols() != n) {
        throw InvalidInput("quadratic: H must be n x n");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            using std::abs;
            if (!is_finite(h(i, j)) || abs(h(i, j) - h(j, i)) > S(1e-12) * (abs(h(i, j)) + abs(h(j, i)))) {
                throw InvalidInput("quadratic: H must be symmetric");
            }
        }
    }
    Eigen::LLT<MatrixT<S>> llt(h);
    if (llt.info() != Eigen::Success) {
        throw InvalidInput("quadratic: H must be positive definite");
    }
    return {"quadratic", [h = std::move(h)](const VectorT<S>& d) { return d.dot(h * d); }, std::move(x_star)};
}

/// Diagonal quadratic sum_i lambda_i (x_i - x*_i)^2, evaluated by direct summation.
template <typename S = double>
BasicObjective<S> quadratic_diag(VectorT<S> spectrum, VectorT<S> x_star, std::string label = "quadratic") {
    if (spectrum.size() != x_star.size()) {
        throw InvalidInput("quadratic: spectrum length must equal the dimension");
    }
    for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
        if (!is_finite(spectrum(i)) || !(spectrum(i) > 0)) {
            throw InvalidInput("quadratic: spectrum must be positive (H must be positive definite)");
        }
    }
    return {std::move(label),
            [spectrum = std::move(spectrum)](const VectorT<S>& d) {
                S acc = S(0);
                for (Eigen::Index i = 0; i < d.size(); ++i) {
                    acc += spectrum(i) * d(i) * d(i);
                }
                return acc;
            },
            std::move(x_star)};
}

/// lambda_i = cond^{(i-1)/(n-1)}.
Vector ellipsoid_spectrum(Eigen::Index n, double condition);

/// ||x - x*||_p for p > 0.
template <typename S = double>
BasicObjective<S> pnorm(double p, VectorT<S> x_star) {
    if (!(p > 0.0) || !std::isfinite(p)) {
        throw InvalidInput("pnorm: p must be positive");
    }
    std::string label = "pnorm:" + std::to_string(p);
    label.erase(label.find_last_not_of('0') + 1);
    if (label.back() == '.') {
        label.pop_back();
    }
    if (p == 1.0) {
        return {label, [](const VectorT<S>& d) { return d.template lpNorm<1>(); }, std::move(x_star)};
    }
    if (p == 2.0) {
        return {label, [](const VectorT<S>& d) { return d.norm(); }, std::move(x_star)};
    }
    return {label,
            [p](const VectorT<S>& d) {
                using std::abs;
                using std::pow;
                S acc = S(0);
                for (Eigen::Index i = 0; i < d.size(); ++i) {
                    acc += pow(abs(d(i)), S(p));
                }
                return S(pow(acc, S(1.0 / p)));
            },
            std::move(x_star)};
}

/// [x - x*]_1
template <typename S = double>
BasicObjective<S> linear(VectorT<S> x_star) {
    return {"linear", [](const VectorT<S>& d) { return d(0); }, std::move(x_star)};
}

/// g(base(x - x*)).
template <typename S>
BasicObjective<S> composite(const BasicTransform<S>& g, const BasicObjective<S>& base) {
    return {g.label + "\xE2\x88\x98" + base.label(),
            [apply = g.apply, inner = base.centered_fn()](const VectorT<S>& d) { return apply(inner(d)); },
            base.reference()};
}

/// ||x - x*||^2 + [x - x*]_1; not scaling-invariant, used as a checker counterexample.
template <typename S = double>
BasicObjective<S> tilted_sphere(VectorT<S> x_star) {
    return {"sphere+linear", [](const VectorT<S>& d) { return S(d.squaredNorm() + d(0)); }, std::move(x_star)};
}

/// Parsed registry name, independent of the scalar type.
struct ObjectiveDescriptor {
    enum class Kind { sphere, linear, pnorm, quadratic, tilted_sphere };
    Kind kind = Kind::sphere;
    std::string base_label;
    double exponent = 2.0;        ///< pnorm
    std::vector<double> spectrum; ///< quadratic eigenvalues
    std::vector<std::string> transforms;  ///< outermost first
};

/// Registry: "sphere", "linear", "pnorm:<p>", "quad:ellipsoid[:<cond>]", "quad:<l1>,<l2>,...",
/// "sphere+linear", and composites "<g>∘<name>" (ASCII alias "<g>@<name>") with
/// g in {"g^{1/4}", "quarter", "arctan", "identity"}.
ObjectiveDescriptor parse_objective(std::string_view name, Eigen::Index n);

template <typename S = double>
BasicObjective<S> build_objective(const ObjectiveDescriptor& d, const VectorT<S>& x_star) {
    auto base = [&]() -> BasicObjective<S> {
        switch (d.kind) {
            case ObjectiveDescriptor::Kind::sphere:
                return sphere<S>(x_star);
            case ObjectiveDescriptor::Kind::linear:
                return linear<S>(x_star);
            case ObjectiveDescriptor::Kind::pnorm:
                return pnorm<S>(d.exponent, x_star);
            case ObjectiveDescriptor::Kind::tilted_sphere:
                return tilted_sphere<S>(x_star);
            case ObjectiveDescriptor::Kind::quadratic: {
                VectorT<S> spectrum(static_cast<Eigen::Index>(d.spectrum.size()));
                for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
                    spectrum(i) = S(d.spectrum[static_cast<std::size_t>(i)]);
                }
                return quadratic_diag<S>(std::move(spectrum), x_star, d.base_label);
            }
        }
        throw InvalidInput("unknown objective kind");
    }();
    for (auto it = d.transforms.rbegin(); it != d.transforms.rend(); ++it) {
        if (*it == "g^{1/4}") {
            base = composite(quarter_root<S>(), base);
        } else if (*it == "arctan") {
            base = composite(arctan_transform<S>(), base);
        } else {
            base = composite(identity_transform<S>(), base);
        }
    }
    return base;
}

template <typename S = double>
BasicObjective<S> make_objective(std::string_view name, Eigen::Index n, const VectorT<S>& x_star) {
    if (x_star.size() != n) {
        throw InvalidInput("objective reference point has the wrong dimension");
    }
    return build_objective<S>(parse_objective(name, n), x_star);
}

template <typename S = double>
BasicObjective<S> make_objective(std::string_view name, Eigen::Index n) {
    if (n < 1) {
        throw InvalidInput("objective dimension must be >= 1");
    }
    return make_objective<S>(name, n, VectorT<S>(VectorT<S>::Zero(n)));
}

enum class Verdict { consistent, refuted };

/// A point pair and scale violating a checked property. For homogeneity, y is empty.
struct Witness {
    Vector x;
    Vector y;
    double rho = 1.0;
};

struct InvarianceReport {
    Verdict verdict = Verdict::consistent;
    std::optional<Witness> witness;
    int trials = 0;

    bool consistent() const { return verdict == Verdict::consistent; }
};

/// {2^k : k = -4..4}
std::vector<double> default_rho_grid();

/// Randomized refutation of scaling invariance w.r.t. the objective's reference point.
/// "consistent" only means no violation was found in `trials` pairs.
InvarianceReport check_scaling_invariance(const Objective& f, int trials, const std::vector<double>& rho_grid,
                                          RngStream& rng);

/// True when the witness flips the ordering under the scaling.
bool flips_ordering(const Objective& f, const Witness& w);

/// Checks f(rho d) = rho^alpha f(d) within 1e-9 relative on random offsets d and
/// log-uniform rho in [2^-4, 2^4].
InvarianceReport check_positive_homogeneity(const Objective& f, double alpha, int trials, RngStream& rng);

bool breaks_homogeneity(const Objective& f, double alpha, const Witness& w);

}  // namespace cbsars::objectives
