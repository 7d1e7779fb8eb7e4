#pragma once

#include <functional>

#include "descent/slit_plane.hpp"

namespace descent {

enum class FieldKind { nls, synthetic };

/// External field of the weighted-energy problem. The nls kind is the
/// field driven by (x, t, A); the synthetic kind evaluates a caller-provided
/// harmonic test function.
struct FieldSpec {
    FieldKind kind = FieldKind::nls;
    double x = 0.0;
    double t = 0.0;
    double A = 1.0;
    std::function<double(Complex)> synthetic_eval;

    static FieldSpec nls(double x, double t, double A) {
        FieldSpec f;
        f.kind = FieldKind::nls;
        f.x = x;
        f.t = t;
        f.A = A;
        return f;
    }
    static FieldSpec synthetic(std::function<double(Complex)> eval, double A = 1.0) {
        FieldSpec f;
        f.kind = FieldKind::synthetic;
        f.A = A;
        f.synthetic_eval = std::move(eval);
        return f;
    }
};

void validate_field(const FieldSpec& f);

/// phi(z) = -int G(z; i s) ds over [0, A]  - Re(pi (iA - z) + 2i (z x + z^2 t)).
/// Evaluated by the closed-form antiderivative of the slit integral.
/// Negative x is handled by the mirror convention phi(z; x) = phi(-conj z; -x),
/// which makes the x -> -x reflection an exact symmetry of the problem.
double external_field(const SlitPoint& z, const FieldSpec& f);
double external_field(Complex z, const FieldSpec& f);

/// Adaptive-quadrature evaluation of the slit integral in phi, used to
/// cross-check the closed form. Absolute tolerance `tol`.
double external_field_quadrature(Complex z, const FieldSpec& f, double tol = 1e-10);

/// Derivative of the complexified field (analytic off the segment [-iA, iA]);
/// the generator used by the quadratic-differential formula in field mode.
Complex field_complex_derivative(Complex z, const FieldSpec& f);

}  // namespace descent
