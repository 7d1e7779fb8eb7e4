#include "descent/wkb.hpp"

#include <cmath>
#include <vector>

namespace descent {

namespace {
constexpr double kPi = 3.14159265358979323846;

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

double gl_integrate(const std::function<double(double)>& f, double a, double b, int n) {
    std::vector<double> x, w;
    gauss_legendre(n, x, w);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += w[i] * f(mid + half * x[i]);
    return s * half;
}

// Doubling Gauss-Legendre until two refinements agree.
double gl_adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol) {
    double prev = gl_integrate(f, a, b, 16);
    for (int n = 32; n <= 1024; n *= 2) {
        const double cur = gl_integrate(f, a, b, n);
        if (std::abs(cur - prev) <= rel_tol * std::max(1.0, std::abs(cur))) return cur;
        prev = cur;
    }
    return prev;
}

}  // namespace

BumpProfile BumpProfile::sech_squared() {
    BumpProfile b;
    b.eval = [](double x) {
        const double c = std::cosh(x);
        return 1.0 / (c * c);
    };
    b.height = 1.0;
    b.peak_x = 0.0;
    b.decay_rate = 2.0;
    return b;
}

void validate_bump(const BumpProfile& u0) {
    if (!u0.eval) throw std::invalid_argument("bump profile needs an evaluator");
    if (std::abs(u0.height - 1.0) > 1e-12)
        throw std::invalid_argument("bump profile must have unit height");
    if (!(u0.eval(u0.peak_x) > 0.0)) throw std::invalid_argument("bump must be positive at peak");
}

std::pair<double, double> turning_points(double z, const BumpProfile& u0) {
    validate_bump(u0);
    if (!(z > 0.0)) throw std::invalid_argument("turning_points: need z > 0");
    if (z > 1.0) throw NoClassicalRegion("turning_points: z > 1, no classical region");
    const double z2 = z * z;
    if (z == 1.0) return {u0.peak_x, u0.peak_x};

    auto bisect = [&](double lo, double hi) {
        // invariant: u0(inner) > z^2 >= u0(outer)
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (u0.eval(mid) > z2)
                lo = mid;
            else
                hi = mid;
            if (std::abs(hi - lo) < 1e-13) break;
        }
        return 0.5 * (lo + hi);
    };

    // Bracket on the right of the peak.
    double hi = u0.peak_x + 1.0;
    while (u0.eval(hi) > z2) hi += 1.0;
    const double xp = bisect(u0.peak_x, hi);
    double lo = u0.peak_x - 1.0;
    while (u0.eval(lo) > z2) lo -= 1.0;
    double xm = lo;
    {
        double a = lo, b = u0.peak_x;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (a + b);
            if (u0.eval(mid) > z2)
                b = mid;
            else
                a = mid;
            if (std::abs(b - a) < 1e-13) break;
        }
        xm = 0.5 * (a + b);
    }
    return {xm, xp};
}

double tau(double z, const BumpProfile& u0) {
    auto [xm, xp] = turning_points(z, u0);
    if (xp <= xm) return 0.0;
    const double z2 = z * z;
    const double mid = 0.5 * (xm + xp), half = 0.5 * (xp - xm);
    // x = mid + half sin(theta): the square-root edge vanishing becomes an
    // analytic cos^2-type integrand in theta.
    auto f = [&](double th) {
        const double x = mid + half * std::sin(th);
        const double v = u0.eval(x) - z2;
        return (v > 0.0 ? std::sqrt(v) : 0.0) * half * std::cos(th);
    };
    return gl_adaptive(f, -0.5 * kPi, 0.5 * kPi, 1e-12);
}

double rho(double z, const BumpProfile& u0) {
    auto [xm, xp] = turning_points(z, u0);
    (void)xm;
    const double z2 = z * z;

    // Truncation point: u0 < 1e-14 z^2 beyond X.
    double X = xp + 1.0;
    while (u0.eval(X) > 1e-14 * z2) X += 1.0;

    // Near the turning point the integrand z - sqrt(z^2 - u0) has a
    // square-root corner; x = xp + s^2 makes it analytic in s.
    const double split = std::min(xp + 1.0, X);
    auto f_near = [&](double s) {
        const double x = xp + s * s;
        const double v = z2 - u0.eval(x);
        return (z - (v > 0.0 ? std::sqrt(v) : 0.0)) * 2.0 * s;
    };
    double val = gl_adaptive(f_near, 0.0, std::sqrt(split - xp), 1e-12);
    if (split < X) {
        auto f_far = [&](double x) {
            const double v = z2 - u0.eval(x);
            return z - (v > 0.0 ? std::sqrt(v) : 0.0);
        };
        val += gl_adaptive(f_far, split, X, 1e-12);
    }
    // Tail: integrand ~ u0 / (2 z); exponential decay rate estimated locally.
    const double uX = u0.eval(X);
    double r = u0.decay_rate;
    const double uX1 = u0.eval(X - 1.0);
    if (uX > 0.0 && uX1 > uX) r = std::log(uX1 / uX);
    if (r > 0.0) val += uX / (2.0 * z * r);

    return xp * z + val;
}

}  // namespace descent
