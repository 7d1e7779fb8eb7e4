#pragma once

#include <functional>
#include <stdexcept>
#include <utility>

namespace descent {

/// Positive analytic bump of unit height decaying at both infinities.
struct BumpProfile {
    std::function<double(double)> eval;
    double height = 1.0;  // sup u0, required = 1
    double peak_x = 0.0;  // location of the single maximum
    double decay_rate = 2.0;  // asymptotic exponential decay rate, for tail bounds

    static BumpProfile sech_squared();
};

void validate_bump(const BumpProfile& u0);

struct NoClassicalRegion : std::domain_error {
    using std::domain_error::domain_error;
};

/// The two solutions of u0(x) = z^2 bracketing the classically allowed
/// region, bisection-refined to 1e-12. Requires 0 < z <= 1.
std::pair<double, double> turning_points(double z, const BumpProfile& u0);

/// tau(z) = int over {u0 > z^2} of sqrt(u0(x) - z^2) dx; the endpoint
/// square-root vanishing is removed by a sine substitution before
/// Gauss-Legendre quadrature.
double tau(double z, const BumpProfile& u0);

/// rho(z) = x_+ z + int_{x_+}^inf [z - sqrt(z^2 - u0(x))] dx, truncated where
/// u0 < 1e-14 z^2 with the analytic tail estimate u0 / (2 z r) added.
double rho(double z, const BumpProfile& u0);

}  // namespace descent
