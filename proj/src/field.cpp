#include "descent/field.hpp"

#include <cmath>
#include <stdexcept>

namespace descent {

namespace {

// Antiderivative Phi(w) = int (1/2) log(a^2 + w^2) dw for fixed |Re z| = a:
// Phi(w) = (w/2) log(a^2 + w^2) - w + a atan(w/a), odd in w.
double log_antiderivative(double a, double w) {
    if (w == 0.0) return 0.0;
    const double r2 = a * a + w * w;
    if (r2 == 0.0) return 0.0;
    double v = 0.5 * w * std::log(r2) - w;
    if (a != 0.0) v += a * std::atan(w / a);
    return v;
}

// int_0^A log(|z + i s| / |z - i s|) ds via the closed form
// Phi(A + b) - Phi(A - b) - 2 Phi(b), with a = |Re z|, b = Im z.
double slit_green_integral(double a_abs, double b, double A) {
    return log_antiderivative(a_abs, A + b) - log_antiderivative(a_abs, A - b) -
           2.0 * log_antiderivative(a_abs, b);
}

double nls_field_value(Complex z, double x, double t, double A) {
    // Mirror convention: the problem at -x is the reflection of the one at x.
    if (x < 0.0) {
        z = Complex(-z.real(), z.imag());
        x = -x;
    }
    const double a = z.real(), b = z.imag();
    const double green_part = slit_green_integral(std::abs(a), b, A);
    // -Re(pi (iA - z)) = pi a;  -Re(2i (z x + z^2 t)) = 2 b x + 4 a b t.
    return -green_part + 3.14159265358979323846 * a + 2.0 * b * x + 4.0 * a * b * t;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

void validate_field(const FieldSpec& f) {
    if (f.kind == FieldKind::nls) {
        if (!(f.A > 0.0)) throw std::invalid_argument("nls field requires A > 0");
    } else if (!f.synthetic_eval) {
        throw std::invalid_argument("synthetic field requires an evaluator");
    }
}

double external_field(Complex z, const FieldSpec& f) {
    if (f.kind == FieldKind::synthetic) {
        if (!f.synthetic_eval) throw std::invalid_argument("synthetic field requires an evaluator");
        return f.synthetic_eval(z);
    }
    return nls_field_value(z, f.x, f.t, f.A);
}

double external_field(const SlitPoint& z, const FieldSpec& f) {
    return external_field(z.value(), f);
}

double external_field_quadrature(Complex z, const FieldSpec& f, double tol) {
    if (f.kind == FieldKind::synthetic) return external_field(z, f);
    double x = f.x;
    Complex w = z;
    if (x < 0.0) {
        w = Complex(-z.real(), z.imag());
        x = -x;
    }
    const double a = w.real(), b = w.imag();
    const double A = f.A;
    auto integrand = [&](double s) {
        const double up = std::hypot(a, b + s);
        double dn = std::hypot(a, b - s);
        if (dn == 0.0) dn = 1e-300;
        return std::log(up / dn);
    };
    double green_part = 0.0;
    if (a == 0.0 && b > 0.0 && b < A) {
        // Split at the logarithmic singularity s = b and shave a sliver whose
        // exact contribution we add in closed form: int log|b - s| over the
        // sliver plus the smooth remainder.
        const double h = std::min({1e-6, 0.5 * b, 0.5 * (A - b)});
        green_part += integrate(integrand, 0.0, b - h, 0.25 * tol);
        green_part += integrate(integrand, b + h, A, 0.25 * tol);
        // Over [b-h, b+h]: log(b+s) is smooth; -log|b-s| integrates to 2h(1-log h).
        green_part += integrate([&](double s) { return std::log(b + s); }, b - h, b + h, 0.25 * tol);
        green_part += 2.0 * h * (1.0 - std::log(h));
    } else {
        green_part = integrate(integrand, 0.0, A, 0.5 * tol);
    }
    return -green_part + 3.14159265358979323846 * a + 2.0 * b * x + 4.0 * a * b * f.t;
}

Complex field_complex_derivative(Complex z, const FieldSpec& f) {
    if (f.kind != FieldKind::nls)
        throw std::invalid_argument("complex derivative defined for the nls field only");
    const double A = f.A;
    const Complex I(0.0, 1.0);
    auto deriv_pos = [&](Complex w, double x) {
        // d/dz of the analytic completion: i [log(z + iA) + log(z - iA) - 2 log z]
        // + pi - 2 i x - 4 i t z.
        return I * (std::log(w + I * A) + std::log(w - I * A) - 2.0 * std::log(w)) +
               3.14159265358979323846 - 2.0 * I * x - 4.0 * I * f.t * w;
    };
    if (f.x < 0.0) {
        // phi(z; x) = phi(-conj z; -x) gives phi'(z; x) = -conj(phi'(-conj z; -x)).
        return -std::conj(deriv_pos(-std::conj(z), -f.x));
    }
    return deriv_pos(z, f.x);
}

}  // namespace descent
