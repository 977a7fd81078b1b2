#pragma once

// Multiprecision scalar for verifying algebraic identities over long horizons.
//
// Paired and coupled runs are pathwise unstable: a perturbation of the
// normalized state is multiplied by sigma_s / sigma_t, so rounding error grows
// like exp(CR * t). Double precision loses a run's pathwise identity after about
// 35 nats of step-size decrease; MPFR with enough bits keeps it.

#include <cmath>

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/mpfr.hpp>

namespace cbsars {

using HighPrecision =
    boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>, boost::multiprecision::et_off>;

/// Compile-time precision with inline limb storage: no heap traffic per value,
/// roughly twice as fast as HighPrecision at a few hundred digits.
template <unsigned Digits10>
using FixedPrecision =
    boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<Digits10, boost::multiprecision::allocate_stack>,
                                  boost::multiprecision::et_off>;

/// Sets the default MPFR precision (decimal digits) for values created in scope.
class PrecisionScope {
public:
    explicit PrecisionScope(unsigned digits10) : previous_(HighPrecision::default_precision()) {
        HighPrecision::default_precision(digits10);
    }
    ~PrecisionScope() { HighPrecision::default_precision(previous_); }

    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

private:
    unsigned previous_;
};

/// Decimal digits that keep `tolerance` relative accuracy through `depth_nats`
/// of pathwise error amplification, with a safety margin.
inline unsigned digits_for_depth(double depth_nats, double tolerance) {
    const double digits = depth_nats / std::log(10.0) - std::log10(tolerance) + 20.0;
    return static_cast<unsigned>(std::ceil(digits));
}

}  // namespace cbsars
