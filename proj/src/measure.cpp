#include "descent/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace descent {

double DiscreteMeasure::total_mass() const {
    return std::accumulate(weights.begin(), weights.end(), 0.0);
}

void validate_measure(const DiscreteMeasure& mu) {
    if (mu.weights.size() != mu.nodes.size() || mu.cell_lengths.size() != mu.nodes.size())
        throw std::invalid_argument("measure arrays must have equal length");
    for (double w : mu.weights)
        if (!(w >= 0.0) || !std::isfinite(w))
            throw std::invalid_argument("measure weights must be finite and nonnegative");
    if (mu.kind == MeasureKind::density) {
        for (double l : mu.cell_lengths)
            if (!(l > 0.0)) throw std::invalid_argument("density cells must have positive length");
    }
    if (!std::isfinite(mu.total_mass()))
        throw std::invalid_argument("measure mass must be finite");
}

DiscreteMeasure make_point_masses(const std::vector<SlitPoint>& nodes,
                                  const std::vector<double>& weights) {
    DiscreteMeasure mu;
    mu.kind = MeasureKind::point_mass;
    mu.nodes = nodes;
    mu.weights = weights;
    mu.cell_lengths.assign(nodes.size(), 1.0);
    validate_measure(mu);
    return mu;
}

DiscreteMeasure make_uniform_density_segment(Complex a, Complex b, int n, double density) {
    if (n < 1) throw std::invalid_argument("need at least one cell");
    DiscreteMeasure mu;
    mu.kind = MeasureKind::density;
    const Complex d = b - a;
    const double L = std::abs(d);
    const double l = L / n;
    mu.nodes.reserve(n);
    for (int k = 0; k < n; ++k) {
        const Complex ca = a + d * (static_cast<double>(k) / n);
        const Complex cb = a + d * (static_cast<double>(k + 1) / n);
        mu.nodes.emplace_back(0.5 * (ca + cb));
        mu.cell_a.push_back(ca);
        mu.cell_b.push_back(cb);
        mu.cell_lengths.push_back(l);
        mu.weights.push_back(density * l);
    }
    return mu;
}

namespace {

// Map a polyline to arc length and sample it.
struct PolylineSampler {
    std::vector<Complex> pts;
    std::vector<double> s;  // cumulative arc length

    explicit PolylineSampler(const Contour& c) {
        pts.reserve(c.vertices.size());
        for (const auto& v : c.vertices) pts.push_back(v.value());
        s.resize(pts.size());
        s[0] = 0.0;
        for (std::size_t i = 1; i < pts.size(); ++i)
            s[i] = s[i - 1] + std::abs(pts[i] - pts[i - 1]);
    }
    double length() const { return s.back(); }
    Complex at(double t) const {
        if (t <= 0.0) return pts.front();
        if (t >= s.back()) return pts.back();
        std::size_t i = 1;
        while (s[i] < t) ++i;
        const double u = (t - s[i - 1]) / (s[i] - s[i - 1]);
        return pts[i - 1] + u * (pts[i] - pts[i - 1]);
    }
};

DiscreteMeasure mesh_with_map(const Contour& c, int n,
                              const std::vector<double>& boundary_params) {
    PolylineSampler poly(c);
    DiscreteMeasure mu;
    mu.kind = MeasureKind::density;
    mu.nodes.reserve(n);
    for (int k = 0; k < n; ++k) {
        const Complex ca = poly.at(boundary_params[k]);
        const Complex cb = poly.at(boundary_params[k + 1]);
        double l = std::abs(cb - ca);
        if (l <= 0.0) l = 1e-300;
        mu.cell_a.push_back(ca);
        mu.cell_b.push_back(cb);
        mu.cell_lengths.push_back(l);
        mu.nodes.emplace_back(0.5 * (ca + cb));
        mu.weights.push_back(0.0);
    }
    return mu;
}

}  // namespace

DiscreteMeasure mesh_contour(const Contour& c, int n) {
    if (n < 8) throw std::invalid_argument("mesh needs at least 8 cells");
    validate_contour(c, std::numeric_limits<double>::infinity());
    PolylineSampler poly(c);
    const double L = poly.length();
    const double pi = 3.14159265358979323846;
    std::vector<double> bpar(n + 1);
    for (int k = 0; k <= n; ++k) {
        const double u = static_cast<double>(k) / n;
        bpar[k] = L * 0.5 * (1.0 - std::cos(pi * u));  // sqrt clustering at both ends
    }
    return mesh_with_map(c, n, bpar);
}

DiscreteMeasure mesh_contour_refined(const Contour& c, int n, const std::vector<double>& refine_at) {
    if (refine_at.empty()) return mesh_contour(c, n);
    validate_contour(c, std::numeric_limits<double>::infinity());
    PolylineSampler poly(c);
    const double L = poly.length();
    const double pi = 3.14159265358979323846;

    // Break the arc at the refinement points; each piece gets nodes
    // proportionally to its length, clustered toward both piece ends.
    std::vector<double> brk{0.0};
    for (double r : refine_at)
        if (r > 1e-12 * L && r < L * (1.0 - 1e-12)) brk.push_back(r);
    brk.push_back(L);
    std::sort(brk.begin(), brk.end());
    brk.erase(std::unique(brk.begin(), brk.end(),
                          [L](double a, double b) { return std::abs(a - b) < 1e-9 * L; }),
              brk.end());

    std::vector<double> bpar;
    bpar.push_back(0.0);
    const int pieces = static_cast<int>(brk.size()) - 1;
    int assigned = 0;
    for (int p = 0; p < pieces; ++p) {
        const double a = brk[p], b = brk[p + 1];
        int m = (p == pieces - 1)
                    ? (n - assigned)
                    : std::max(2, static_cast<int>(std::lround(n * (b - a) / L)));
        m = std::min(m, n - assigned - 2 * (pieces - 1 - p));
        m = std::max(m, 2);
        assigned += m;
        for (int k = 1; k <= m; ++k) {
            const double u = static_cast<double>(k) / m;
            bpar.push_back(a + (b - a) * 0.5 * (1.0 - std::cos(pi * u)));
        }
    }
    bpar.back() = L;
    return mesh_with_map(c, static_cast<int>(bpar.size()) - 1, bpar);
}

}  // namespace descent
