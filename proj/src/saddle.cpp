#include "descent/saddle.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace descent {

namespace {
constexpr double kPi = 3.14159265358979323846;

Complex horner(const std::vector<Complex>& c, Complex t) {
    Complex v(0.0, 0.0);
    for (std::size_t k = c.size(); k-- > 0;) v = v * t + c[k];
    return v;
}

std::vector<Complex> poly_derivative(const std::vector<Complex>& c) {
    std::vector<Complex> d;
    for (std::size_t k = 1; k < c.size(); ++k) d.push_back(static_cast<double>(k) * c[k]);
    return d;
}
}  // namespace

Complex PolynomialPhase::eval(Complex t) const { return horner(coefficients, t); }
Complex PolynomialPhase::derivative(Complex t) const {
    return horner(poly_derivative(coefficients), t);
}
Complex PolynomialPhase::second_derivative(Complex t) const {
    return horner(poly_derivative(poly_derivative(coefficients)), t);
}

void validate_phase(const PolynomialPhase& p) {
    if (p.degree() < 2) throw std::invalid_argument("phase degree must be >= 2");
    if (std::abs(p.coefficients.back()) == 0.0)
        throw std::invalid_argument("leading coefficient must be nonzero");
}

std::vector<Complex> saddle_points(const PolynomialPhase& phase) {
    validate_phase(phase);
    std::vector<Complex> d = poly_derivative(phase.coefficients);
    while (!d.empty() && std::abs(d.back()) == 0.0) d.pop_back();
    const int m = static_cast<int>(d.size()) - 1;  // degree of h'
    if (m < 1) return {};
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(m, m);
    for (int k = 0; k < m; ++k) C(k, m - 1) = -d[k] / d[m];
    for (int k = 1; k < m; ++k) C(k, k - 1) = 1.0;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
    std::vector<Complex> roots;
    roots.reserve(m);
    for (int k = 0; k < m; ++k) {
        Complex r = es.eigenvalues()[k];
        for (int it = 0; it < 50; ++it) {  // Newton polish
            const Complex f = horner(d, r);
            const Complex fp = horner(poly_derivative(d), r);
            if (std::abs(fp) == 0.0) break;
            const Complex step = f / fp;
            r -= step;
            if (std::abs(step) < 1e-15 * (1.0 + std::abs(r))) break;
        }
        roots.push_back(r);
    }
    std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return roots;
}

std::vector<Complex> descent_directions(const PolynomialPhase& phase, Complex saddle) {
    validate_phase(phase);
    // Find the first nonvanishing derivative beyond h' at the saddle.
    std::vector<Complex> d = poly_derivative(phase.coefficients);
    int order = 2;
    Complex lead(0.0, 0.0);
    double fact = 1.0;
    std::vector<Complex> cur = d;
    const double tol = 1e-9;
    for (int k = 2; k <= phase.degree(); ++k) {
        cur = poly_derivative(cur);
        fact *= k;
        const Complex v = horner(cur, saddle);
        if (std::abs(v) > tol) {
            order = k;
            lead = v / fact;  // h(t) ~ h(saddle) + lead (t - saddle)^order
            break;
        }
    }
    if (std::abs(lead) == 0.0) throw std::invalid_argument("degenerate saddle beyond degree");
    // Descent rays of exp(i scale h): need arg(i lead d^order) = pi (+ sign of scale).
    const double target = phase.scale >= 0.0 ? kPi : 0.0;
    const double base = (target - std::arg(Complex(0.0, 1.0) * lead)) / order;
    std::vector<Complex> dirs;
    for (int k = 0; k < order; ++k) {
        const double th = base + 2.0 * kPi * k / order;
        dirs.push_back(std::polar(1.0, std::remainder(th, 2.0 * kPi)));
    }
    std::sort(dirs.begin(), dirs.end(),
              [](Complex a, Complex b) { return std::arg(a) < std::arg(b); });
    return dirs;
}

SteepestPath trace_steepest_path(const PolynomialPhase& phase, Complex saddle, Complex direction,
                                 double magnitude_cutoff) {
    validate_phase(phase);
    const Complex I(0.0, 1.0);
    auto W = [&](Complex t) { return I * phase.eval(t); };
    auto Wp = [&](Complex t) { return I * phase.derivative(t); };

    direction /= std::abs(direction);
    {
        // Reject ascending start directions: Re W must not increase.
        const double h0 = 1e-6;
        const double dRe = (W(saddle + h0 * direction) - W(saddle)).real();
        if (dRe > 1e-13)
            throw std::invalid_argument("trace_steepest_path: direction is ascending");
    }

    SteepestPath path;
    path.level = W(saddle).imag();
    path.points.push_back(saddle);

    const double scale = std::abs(phase.scale) > 0.0 ? std::abs(phase.scale) : 1.0;
    const double stop_drop = std::log(magnitude_cutoff) / scale;  // negative
    const double re0 = W(saddle).real();

    // Leave the saddle along the ray until the gradient is usable.
    Complex t = saddle;
    double h = 1e-3;
    Complex tangent = direction;
    const std::vector<Complex> saddles = saddle_points(phase);

    for (int step = 0; step < 20000; ++step) {
        // Predictor along the curve tangent -conj(W') / |W'| (signed to keep
        // moving the same way), with a small first step straight along `direction`.
        Complex t_pred;
        const Complex g = Wp(t);
        const double gn = std::abs(g);
        if (gn < 1e-14) {
            t_pred = t + h * tangent;
        } else {
            Complex dir = -std::conj(g) / gn;
            if ((dir * std::conj(tangent)).real() < 0.0) dir = -dir;
            // Curvature-limited step.
            const Complex g2 = I * phase.second_derivative(t);
            const double curv = std::abs(g2) / std::max(gn, 1e-300);
            h = std::clamp(0.1 / std::max(curv, 1e-6), 1e-4, 0.25);
            t_pred = t + h * dir;
            tangent = dir;
        }
        // Corrector: Newton steps along the normal to restore Im W = level.
        Complex tc = t_pred;
        for (int it = 0; it < 8; ++it) {
            const Complex gw = Wp(tc);
            const double gwn = std::abs(gw);
            if (gwn < 1e-14) break;
            const double res = W(tc).imag() - path.level;
            if (std::abs(res) < 1e-12) break;
            const Complex n = I * std::conj(gw) / gwn;  // Im W changes at unit rate
            tc -= res / gwn * n;
        }
        path.max_level_drift = std::max(path.max_level_drift, std::abs(W(tc).imag() - path.level));
        path.points.push_back(tc);
        t = tc;

        // Junction with another saddle?
        for (Complex s : saddles) {
            if (std::abs(s - saddle) > 1e-12 && std::abs(t - s) < 1e-6) {
                path.hit_other_saddle = true;
                return path;
            }
        }
        if ((W(t).real() - re0) < stop_drop) break;
        if (std::abs(t) > 1e6) break;
    }
    return path;
}

namespace {

// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) {
        double xi = std::cos(kPi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = xi;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
            const double dx = p1 / dp;
            xi -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = xi;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
        x[i] = xi;
        w[i] = 2.0 / ((1.0 - xi * xi) * dp * dp);
    }
}

// Integral of exp(i h(t)) dt along the sampled polyline (the integrand is
// entire, so chords between samples are as good as the exact curve).
Complex integrate_along(const PolynomialPhase& phase, const SteepestPath& path, int order) {
    std::vector<double> gx, gw;
    gauss_legendre(order, gx, gw);
    const Complex I(0.0, 1.0);
    Complex acc(0.0, 0.0);
    for (std::size_t k = 1; k < path.points.size(); ++k) {
        const Complex a = path.points[k - 1], b = path.points[k];
        const Complex mid = 0.5 * (a + b), half = 0.5 * (b - a);
        Complex seg(0.0, 0.0);
        for (int q = 0; q < order; ++q)
            seg += gw[q] * std::exp(I * phase.scale * phase.eval(mid + gx[q] * half));
        acc += seg * half;
    }
    return acc;
}

}  // namespace

double airy_deformed_with_paths(double z, std::vector<SteepestPath>& paths, int quad_order) {
    if (z < 0.0) throw std::invalid_argument("airy_deformed: z must be >= 0");
    // Ai(z) = (1/2pi) int exp(i (s^3/3 + z s)) ds over the real line, deformed
    // through the saddle i sqrt(z) (the degenerate saddle 0 when z = 0).
    PolynomialPhase p;
    p.coefficients = {Complex(0, 0), Complex(z, 0), Complex(0, 0), Complex(1.0 / 3.0, 0)};
    p.scale = 1.0;
    const Complex saddle(0.0, std::sqrt(z));
    auto dirs = descent_directions(p, saddle);
    // Right-going and left-going branches: directions closest to 0 and pi.
    Complex dr = dirs.front(), dl = dirs.front();
    double best_r = 1e9, best_l = 1e9;
    for (Complex d : dirs) {
        const double ar = std::abs(std::arg(d));
        const double al = kPi - std::abs(std::arg(d));
        if (ar < best_r) {
            best_r = ar;
            dr = d;
        }
        if (al < best_l) {
            best_l = al;
            dl = d;
        }
    }
    SteepestPath right = trace_steepest_path(p, saddle, dr);
    SteepestPath left = trace_steepest_path(p, saddle, dl);
    const Complex integral = integrate_along(p, right, quad_order) - integrate_along(p, left, quad_order);
    paths.clear();
    paths.push_back(std::move(left));
    paths.push_back(std::move(right));
    return integral.real() / (2.0 * kPi);
}

double airy_deformed(double z, int quad_order) {
    std::vector<SteepestPath> paths;
    return airy_deformed_with_paths(z, paths, quad_order);
}

}  // namespace descent
