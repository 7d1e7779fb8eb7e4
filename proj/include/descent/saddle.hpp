#pragma once

#include <complex>
#include <vector>

namespace descent {

using Complex = std::complex<double>;

/// Oscillatory phase h(t) = sum coefficients[k] t^k of the integrand
/// exp(i * scale * h(t)). The descent exponent is W = i h: Im W is the
/// conserved quantity along steepest-descent paths and Re(scale W) is the
/// log-magnitude that decays along them.
struct PolynomialPhase {
    std::vector<Complex> coefficients;  // degree >= 2, nonzero leading term
    double scale = 1.0;

    int degree() const { return static_cast<int>(coefficients.size()) - 1; }
    Complex eval(Complex t) const;
    Complex derivative(Complex t) const;
    Complex second_derivative(Complex t) const;
};

void validate_phase(const PolynomialPhase& p);

/// All zeros of h' by companion-matrix eigenvalues, Newton-polished.
std::vector<Complex> saddle_points(const PolynomialPhase& phase);

struct SteepestPath {
    std::vector<Complex> points;      // starts at the saddle
    double level = 0.0;               // Im W at the saddle
    double max_level_drift = 0.0;     // max |Im W - level| over samples
    bool hit_other_saddle = false;
};

/// Descent directions at a saddle, sorted by argument. Simple saddles get
/// the two solutions of arg(i h'' d^2) = pi; a saddle of multiplicity m
/// gets the m+1 descent rays of its leading nonvanishing derivative.
std::vector<Complex> descent_directions(const PolynomialPhase& phase, Complex saddle);

/// Traces the steepest-descent branch of exp(i scale h) leaving `saddle`
/// along `direction` by predictor-corrector on Im W = const; stops when the
/// integrand has decayed below the cutoff relative to the saddle value.
SteepestPath trace_steepest_path(const PolynomialPhase& phase, Complex saddle,
                                 Complex direction, double magnitude_cutoff = 1e-18);

/// Ai(z) for z >= 0 by deforming the Fourier representation onto the
/// steepest-descent branches through the relevant saddle and applying
/// Gauss-Legendre quadrature on the traced samples.
double airy_deformed(double z, int quad_order = 8);

/// Same evaluation, exposing the traced branches for inspection/plots.
double airy_deformed_with_paths(double z, std::vector<SteepestPath>& paths, int quad_order = 8);

}  // namespace descent
