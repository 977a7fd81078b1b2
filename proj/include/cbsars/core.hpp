#pragma once

// Comparison-based step-size adaptive randomized search: the generic pieces.
//
// One iteration maps the state (x, sigma) and a raw sample block u = (u^1..u^p)
// to a new state. Candidates are produced by a solution map, ranked by objective
// value, and the update only sees the ranked block S*u, never the f-values.
//
// Everything numeric is templated on the scalar type. Production code uses
// double; the identity checks also instantiate a multiprecision type (see
// multiprecision.hpp).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cbsars/errors.hpp"
#include "cbsars/rng.hpp"

namespace cbsars {

template <typename S>
using VectorT = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <typename S>
using MatrixT = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = VectorT<double>;

template <typename S>
using BasicObjectiveFn = std::function<S(const VectorT<S>&)>;
using ObjectiveFn = BasicObjectiveFn<double>;

template <typename S>
bool is_finite(const S& v) {
    using std::isfinite;
    return isfinite(v);
}

template <typename S>
bool all_finite(const VectorT<S>& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!is_finite(v(i))) {
            return false;
        }
    }
    return true;
}

template <typename S>
double to_double(const S& v) {
    return static_cast<double>(v);
}

/// ln v for v > 0 in double precision, without overflow or underflow for
/// multiprecision values far outside the double range.
template <typename S>
double log_of(const S& v) {
    using std::frexp;
    int e = 0;
    const S m = frexp(v, &e);
    return std::log(to_double(m)) + static_cast<double>(e) * 0.69314718055994530942;
}

/// Incumbent point and step-size. sigma > 0 and x finite are enforced on construction.
template <typename S>
struct BasicAlgorithmState {
    BasicAlgorithmState(VectorT<S> x_, S sigma_) : x(std::move(x_)), sigma(std::move(sigma_)) {
        if (!(sigma > 0) || !is_finite(sigma)) {
            throw InvalidInput("step-size must be positive and finite");
        }
        if (!all_finite(x)) {
            throw InvalidInput("state contains a non-finite coordinate");
        }
    }

    VectorT<S> x;
    S sigma;
};

using AlgorithmState = BasicAlgorithmState<double>;

/// One iteration's raw randomness: p coordinates of dimension m, stored as columns.
template <typename S>
class BasicSampleBlock {
public:
    explicit BasicSampleBlock(MatrixT<S> coords) : coords_(std::move(coords)) {
        if (coords_.cols() < 1 || coords_.rows() < 1) {
            throw InvalidInput("sample block needs at least one coordinate of dimension >= 1");
        }
    }

    std::size_t size() const noexcept { return static_cast<std::size_t>(coords_.cols()); }
    Eigen::Index dim() const noexcept { return coords_.rows(); }

    auto coord(std::size_t i) const { return coords_.col(static_cast<Eigen::Index>(i)); }
    const MatrixT<S>& matrix() const noexcept { return coords_; }

    bool operator==(const BasicSampleBlock& other) const { return coords_ == other.coords_; }

private:
    MatrixT<S> coords_;
};

using SampleBlock = BasicSampleBlock<double>;

/// A permutation S of {0..p-1}; indices()[k] is the position in the raw block
/// of the k-th best candidate. (Zero-based: S(k) in one-based notation is indices()[k-1] + 1.)
class RankingPermutation {
public:
    explicit RankingPermutation(std::vector<std::size_t> indices);

    static RankingPermutation identity(std::size_t p);

    std::size_t size() const noexcept { return indices_.size(); }
    std::size_t operator[](std::size_t k) const { return indices_[k]; }
    const std::vector<std::size_t>& indices() const noexcept { return indices_; }

    bool operator==(const RankingPermutation&) const = default;

private:
    std::vector<std::size_t> indices_;
};

/// Ascending order of `values`; equal values keep their original relative order.
/// Throws InvalidInput on an empty list or a non-finite value.
template <typename S>
RankingPermutation ord(std::span<const S> values) {
    if (values.empty()) {
        throw InvalidInput("ord: empty value list");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!is_finite(values[i])) {
            std::ostringstream msg;
            msg << "ord: non-finite value at index " << i;
            throw InvalidInput(msg.str());
        }
    }
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    return RankingPermutation(std::move(idx));
}

inline RankingPermutation ord(std::span<const double> values) { return ord<double>(values); }

/// S*u = (u^{S(1)}, ..., u^{S(p)}).
template <typename S>
BasicSampleBlock<S> apply_permutation(const RankingPermutation& s, const BasicSampleBlock<S>& u) {
    if (s.size() != u.size()) {
        throw InvalidInput("apply_permutation: permutation and block sizes differ");
    }
    MatrixT<S> out(u.dim(), static_cast<Eigen::Index>(u.size()));
    for (std::size_t k = 0; k < s.size(); ++k) {
        out.col(static_cast<Eigen::Index>(k)) = u.coord(s[k]);
    }
    return BasicSampleBlock<S>(std::move(out));
}

/// A concrete algorithm: the quadruplet (solution map, mean update, step-size
/// update, sampler) plus sizes. The step-size update takes (sigma, ranked block)
/// only, so it cannot depend on x.
template <typename S>
struct BasicAlgorithmSpec {
    using State = BasicAlgorithmState<S>;
    using Block = BasicSampleBlock<S>;
    using SolutionMap = std::function<VectorT<S>(const State&, const Eigen::Ref<const VectorT<S>>&)>;
    using MeanUpdate = std::function<VectorT<S>(const State&, const Block&)>;
    using StepSizeUpdate = std::function<S(const S&, const Block&)>;
    using Sampler = std::function<Block(RngStream&)>;
    using Ranker = std::function<RankingPermutation(std::span<const S>)>;

    std::string name;
    std::size_t p = 0;
    Eigen::Index n = 0;
    Eigen::Index m = 0;
    /// Function evaluations charged per iteration in traces (p, or 1 for plus-selection).
    std::size_t evals_per_iteration = 0;

    SolutionMap sol;
    MeanUpdate g1;
    StepSizeUpdate g2;
    Sampler sampler;
    /// Ordering of candidate f-values; ord() unless the algorithm overrides tie handling.
    Ranker rank = [](std::span<const S> v) { return ord<S>(v); };
};

using AlgorithmSpec = BasicAlgorithmSpec<double>;

/// Checks that u matches the spec's (p, m); throws InvalidInput otherwise.
template <typename S>
void check_block(const BasicSampleBlock<S>& u, const BasicAlgorithmSpec<S>& spec) {
    if (u.size() != spec.p || u.dim() != spec.m) {
        std::ostringstream msg;
        msg << spec.name << ": expected a block of " << spec.p << " coordinates of dimension " << spec.m << ", got "
            << u.size() << " of dimension " << u.dim();
        throw InvalidInput(msg.str());
    }
}

/// Candidate points Sol(state, u^i), i = 1..p.
template <typename S>
std::vector<VectorT<S>> candidates(const BasicAlgorithmState<S>& state, const BasicSampleBlock<S>& u,
                                   const BasicAlgorithmSpec<S>& spec) {
    check_block(u, spec);
    std::vector<VectorT<S>> out;
    out.reserve(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        out.push_back(spec.sol(state, u.coord(i)));
    }
    return out;
}

/// Evaluates the candidates and ranks them. Throws EvaluationError on a non-finite f-value.
template <typename S>
RankingPermutation rank_candidates(const BasicAlgorithmState<S>& state, const BasicSampleBlock<S>& u,
                                   const BasicAlgorithmSpec<S>& spec, const BasicObjectiveFn<S>& f) {
    const auto points = candidates(state, u, spec);
    std::vector<S> values(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        values[i] = f(points[i]);
        if (!is_finite(values[i])) {
            Vector where(points[i].size());
            for (Eigen::Index k = 0; k < where.size(); ++k) {
                where(k) = to_double(points[i](k));
            }
            throw EvaluationError("objective returned a non-finite value", std::move(where));
        }
    }
    return spec.rank(std::span<const S>(values));
}

/// The ranked block S*u for this state.
template <typename S>
BasicSampleBlock<S> select(const BasicAlgorithmState<S>& state, const BasicSampleBlock<S>& u,
                           const BasicAlgorithmSpec<S>& spec, const BasicObjectiveFn<S>& f) {
    return apply_permutation(rank_candidates(state, u, spec, f), u);
}

/// G(state, y) for an already ranked block.
template <typename S>
BasicAlgorithmState<S> update(const BasicAlgorithmState<S>& state, const BasicSampleBlock<S>& y,
                              const BasicAlgorithmSpec<S>& spec) {
    check_block(y, spec);
    VectorT<S> x_next = spec.g1(state, y);
    S sigma_next = spec.g2(state.sigma, y);
    if (!(sigma_next > 0)) {
        throw InvariantViolation(spec.name + ": step-size update produced a non-positive value");
    }
    return BasicAlgorithmState<S>(std::move(x_next), std::move(sigma_next));
}

/// One full iteration: G((x, sigma), S*u) with S = Ord(f(Sol((x, sigma), u^i))).
template <typename S>
BasicAlgorithmState<S> step(const BasicAlgorithmState<S>& state, const BasicSampleBlock<S>& u,
                            const BasicAlgorithmSpec<S>& spec, const BasicObjectiveFn<S>& f) {
    return update(state, select(state, u, spec, f), spec);
}

}  // namespace cbsars
