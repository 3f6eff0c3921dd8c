#ifndef PULSALOOP_BESSEL_HPP
#define PULSALOOP_BESSEL_HPP

/**
 * @file bessel.hpp
 * @brief J0 and J1 of complex argument by the ascending power series.
 *
 *   J0(z) = Σ_k (−z²/4)^k / (k!)²
 *   J1(z) = (z/2) Σ_k (−z²/4)^k / (k! (k+1)!)
 *
 * Terms are generated by multiplicative recursion. The series is accurate for
 * moderate |z|; beyond kMaxArgument cancellation between large terms destroys
 * precision, so those arguments are rejected.
 */

#include <cmath>
#include <complex>
#include <string>

#include "pulsaloop/error.hpp"

namespace pulsaloop {

struct BesselJ01 {
    std::complex<double> j0;
    std::complex<double> j1;
};

inline constexpr double kBesselMaxArgument = 15.0;

inline BesselJ01 bessel_j01(std::complex<double> z) {
    if (!(std::abs(z) <= kBesselMaxArgument)) {
        throw out_of_range("bessel_j01: |z| = " + std::to_string(std::abs(z)) + " exceeds the series cap of " +
                           std::to_string(kBesselMaxArgument));
    }
    constexpr double kRelStop = 1.0e-16;
    constexpr int kMaxTerms = 200;

    const std::complex<double> q = -0.25 * z * z;
    std::complex<double> term0 = 1.0;
    std::complex<double> term1 = 1.0;
    std::complex<double> sum0 = 1.0;
    std::complex<double> sum1 = 1.0;
    bool done0 = false;
    bool done1 = false;
    for (int k = 1; k <= kMaxTerms && !(done0 && done1); ++k) {
        const double kd = static_cast<double>(k);
        term0 *= q / (kd * kd);
        term1 *= q / (kd * (kd + 1.0));
        sum0 += term0;
        sum1 += term1;
        // The next term is |q|/k² times this one; stop once it cannot move the sum.
        done0 = std::abs(term0) * std::abs(q) / ((kd + 1.0) * (kd + 1.0)) < kRelStop * std::abs(sum0);
        done1 = std::abs(term1) * std::abs(q) / ((kd + 1.0) * (kd + 2.0)) < kRelStop * std::abs(sum1);
    }
    if (!(done0 && done1)) {
        throw numerical_error("bessel_j01: series did not converge");
    }
    return {sum0, 0.5 * z * sum1};
}

}  // namespace pulsaloop

#endif  // PULSALOOP_BESSEL_HPP
