#include "descent/potential.hpp"

#include <cmath>
#include <functional>

namespace descent {

namespace {

// Antiderivative of log sqrt(h^2 + u^2) in u; even in h, and the h = 0
// limit u log|u| - u covers evaluation points on the segment itself.
double log_dist_antiderivative(double h, double u) {
    if (u == 0.0) return 0.0;
    const double r2 = h * h + u * u;
    if (r2 == 0.0) return 0.0;
    double v = 0.5 * u * std::log(r2) - u;
    if (h != 0.0) v += h * std::atan(u / h);
    return v;
}

// Second-order cell-extent correction to midpoint evaluation of log|x - y|
// for straight cells with unit tangents ti, tj and midpoint separation v:
// avg log = log|v| - (1/24) Re[(li^2 ti^2 + lj^2 tj^2) / v^2] + O((l/d)^4).
double tensor_log_correction(Complex v, Complex ti, Complex tj, double li, double lj) {
    const Complex v2 = v * v;
    if (std::abs(v2) == 0.0) return 0.0;
    return -(1.0 / 24.0) * ((li * li * ti * ti + lj * lj * tj * tj) / v2).real();
}

}  // namespace

double green(Complex z, Complex eta) {
    const double dn = std::abs(z - eta);
    if (dn == 0.0) throw SingularKernelError("green: singular kernel evaluation");
    const double up = std::abs(z - std::conj(eta));
    return std::log(up / dn);
}

double green(const SlitPoint& z, const SlitPoint& eta) { return green(z.value(), eta.value()); }

double segment_log_integral(Complex z, Complex a, Complex b) {
    const Complex d = b - a;
    const double l = std::abs(d);
    if (l == 0.0) return 0.0;
    const Complex e = d / l;
    // Coordinates along the segment line with origin at the foot of the
    // perpendicular from z: eta = a + u * e has log|z - eta| = log sqrt(h^2+u^2).
    const Complex rel = std::conj(e) * (a - z);
    const double u1 = rel.real();
    const double h = rel.imag();
    return log_dist_antiderivative(h, u1 + l) - log_dist_antiderivative(h, u1);
}

double self_cell_correction(const SlitPoint& node, double cell_length) {
    if (!(cell_length > 0.0)) throw std::invalid_argument("cell length must be positive");
    const double b = node.im;
    const double reflected = (b > 0.0) ? std::log(2.0 * b) : -700.0;
    return reflected - std::log(cell_length) + 1.5;
}

double green_potential(const SlitPoint& z, const DiscreteMeasure& mu, NodePolicy policy) {
    validate_measure(mu);
    const Complex zc = z.value();
    double v = 0.0;
    for (std::size_t j = 0; j < mu.size(); ++j) {
        if (mu.weights[j] == 0.0) continue;
        const Complex nj = mu.nodes[j].value();
        if (zc == nj) {
            if (policy == NodePolicy::error || mu.kind == MeasureKind::point_mass)
                throw SingularKernelError("green_potential: singular kernel evaluation");
            // Exact cell average of the kernel at the cell's own midpoint:
            // the -log|z-eta| part integrates to l (1 - log(l/2)).
            const double l = mu.cell_lengths[j];
            const double reflected = (z.im > 0.0) ? std::log(2.0 * z.im) : -700.0;
            v += mu.weights[j] * (reflected + 1.0 - std::log(0.5 * l));
            continue;
        }
        v += mu.weights[j] * green(zc, nj);
    }
    return v;
}

double green_potential_cellwise(Complex z, const DiscreteMeasure& mu) {
    if (!mu.has_cell_geometry())
        throw std::invalid_argument("cellwise potential needs cell geometry");
    double v = 0.0;
    for (std::size_t j = 0; j < mu.size(); ++j) {
        if (mu.weights[j] == 0.0) continue;
        const double l = mu.cell_lengths[j];
        const Complex a = mu.cell_a[j], b = mu.cell_b[j];
        const double up = segment_log_integral(z, std::conj(a), std::conj(b));
        const double dn = segment_log_integral(z, a, b);
        v += mu.weights[j] / l * (up - dn);
    }
    return v;
}

namespace {

// Average of segment_log_integral(y, cell [a,b]) / li over y in [c, d],
// by adaptive Simpson in the outer variable. Exact inner integral, so the
// only resolution burden is the outer variation near close approaches.
double pair_log_average(Complex a, Complex b, Complex c, Complex d) {
    const double li = std::abs(b - a);
    auto f = [&](double u) { return segment_log_integral(c + u * (d - c), a, b) / li; };
    std::function<double(double, double, double, double, double, double, int)> go =
        [&](double lo, double hi, double flo, double fmid, double fhi, double whole,
            int depth) -> double {
        const double m = 0.5 * (lo + hi);
        const double lm = 0.5 * (lo + m), rm = 0.5 * (m + hi);
        const double flm = f(lm), frm = f(rm);
        const double left = (m - lo) / 6.0 * (flo + 4.0 * flm + fmid);
        const double right = (hi - m) / 6.0 * (fmid + 4.0 * frm + fhi);
        const double delta = left + right - whole;
        if (depth <= 0 || std::abs(delta) <= 1e-11) return left + right + delta / 15.0;
        return go(lo, m, flo, flm, fmid, left, depth - 1) +
               go(m, hi, fmid, frm, fhi, right, depth - 1);
    };
    const double f0 = f(0.0), fm = f(0.5), f1 = f(1.0);
    const double whole = (f0 + 4.0 * fm + f1) / 6.0;
    return go(0.0, 1.0, f0, fm, f1, whole, 24);
}

// Cell-pair average of log|x - y| (or of log|x - y*| when the second cell is
// passed conjugated). Near pairs get the exact treatment; separated pairs
// midpoint evaluation plus the tensor correction. The near radius grows like
// sqrt(cell * total arc), which keeps the truncated correction tail decaying
// faster than the second-order terms of the overall scheme.
double cell_avg_log(Complex ai, Complex bi, Complex aj, Complex bj, double arc_total) {
    const double li = std::abs(bi - ai), lj = std::abs(bj - aj);
    const Complex xi = 0.5 * (ai + bi), xj = 0.5 * (aj + bj);
    const Complex v = xi - xj;
    const double dist = std::abs(v);
    const double near_radius =
        std::max(3.0 * (li + lj), std::sqrt(std::max(li, lj) * arc_total));
    if (dist > near_radius) {
        const Complex ti = (bi - ai) / li, tj = (bj - aj) / lj;
        return std::log(dist) + tensor_log_correction(v, ti, tj, li, lj);
    }
    return pair_log_average(aj, bj, ai, bi);
}

}  // namespace

Eigen::MatrixXd energy_kernel_matrix(const DiscreteMeasure& mu) {
    const auto n = static_cast<Eigen::Index>(mu.size());
    Eigen::MatrixXd K(n, n);
    const bool geom = mu.has_cell_geometry();
    double arc_total = 0.0;
    if (geom)
        for (double l : mu.cell_lengths) arc_total += l;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double li = mu.cell_lengths[i];
        if (geom) {
            const Complex ai = mu.cell_a[i], bi = mu.cell_b[i];
            // Reflected part averaged over the cell against its mirror image;
            // the -log part over a straight cell is log l - 3/2 exactly.
            const double refl = cell_avg_log(ai, bi, std::conj(ai), std::conj(bi), arc_total);
            K(i, i) = refl - (std::log(li) - 1.5);
        } else {
            K(i, i) = self_cell_correction(mu.nodes[i], li);
        }
        for (Eigen::Index j = i + 1; j < n; ++j) {
            double g;
            if (geom) {
                const Complex ai = mu.cell_a[i], bi = mu.cell_b[i];
                const Complex aj = mu.cell_a[j], bj = mu.cell_b[j];
                g = cell_avg_log(ai, bi, std::conj(aj), std::conj(bj), arc_total) -
                    cell_avg_log(ai, bi, aj, bj, arc_total);
            } else {
                g = green(mu.nodes[i], mu.nodes[j]);
            }
            K(i, j) = g;
            K(j, i) = g;
        }
    }
    return K;
}

double energy(const DiscreteMeasure& mu) {
    validate_measure(mu);
    if (mu.empty()) return 0.0;
    if (mu.kind == MeasureKind::point_mass)
        throw std::invalid_argument("energy: point masses have infinite self-energy");
    const Eigen::MatrixXd K = energy_kernel_matrix(mu);
    Eigen::Map<const Eigen::VectorXd> w(mu.weights.data(), static_cast<Eigen::Index>(mu.size()));
    return w.dot(K * w);
}

double weighted_energy(const DiscreteMeasure& mu, const FieldSpec& f) {
    validate_measure(mu);
    if (mu.empty()) return 0.0;
    double lin = 0.0;
    for (std::size_t j = 0; j < mu.size(); ++j) {
        if (mu.weights[j] == 0.0) continue;
        lin += mu.weights[j] * external_field(mu.nodes[j], f);
    }
    return energy(mu) + 2.0 * lin;
}

}  // namespace descent
