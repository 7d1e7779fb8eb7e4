#include "descent/slit_plane.hpp"

#include <algorithm>
#include <cmath>

namespace descent {

namespace {

double dist(Complex a, Complex b) { return std::abs(a - b); }

// Distance from p to the segment {0} x [lo, hi].
double distance_to_vertical_segment(Complex p, double lo, double hi) {
    const double y = std::clamp(p.imag(), lo, hi);
    return std::abs(p - Complex(0.0, y));
}

}  // namespace

void validate_slit_point(const SlitPoint& p, double spike_height) {
    if (!(p.im >= 0.0)) throw std::invalid_argument("slit point below the real axis");
    if (p.side != SpikeSide::off_spike) {
        if (p.re != 0.0 || !(p.im > 0.0) || !(p.im <= spike_height))
            throw std::invalid_argument("side tag on a point that is not on the slit");
    }
}

bool segment_blocked_by_spike(Complex a, Complex b, double spike_height) {
    const double xa = a.real(), xb = b.real();
    if (xa == 0.0 && xb == 0.0) return false;  // travel along the axis hugs one side
    if ((xa > 0.0 && xb > 0.0) || (xa < 0.0 && xb < 0.0)) return false;
    // Crossing height of the segment at Re = 0.
    double y0;
    if (xa == 0.0) {
        y0 = a.imag();
    } else if (xb == 0.0) {
        y0 = b.imag();
    } else {
        const double s = xa / (xa - xb);
        y0 = a.imag() + s * (b.imag() - a.imag());
    }
    return y0 < spike_height;  // the tip itself is passable
}

double slit_distance(const SlitPoint& p, const SlitPoint& q, double spike_height) {
    const Complex zp = p.value(), zq = q.value();
    const Complex tip(0.0, spike_height);

    // Effective signs; side tags stand in for the sign at Re = 0.
    auto sign_of = [](const SlitPoint& s) -> int {
        if (s.re > 0.0) return +1;
        if (s.re < 0.0) return -1;
        if (s.side == SpikeSide::left) return -1;
        if (s.side == SpikeSide::right) return +1;
        return 0;  // on the axis above the tip, or at the origin untagged
    };
    const int sp = sign_of(p), sq = sign_of(q);

    bool blocked = false;
    if (sp != 0 && sq != 0 && sp != sq) {
        blocked = segment_blocked_by_spike(zp, zq, spike_height);
        // Two tagged points of the slit on opposite sides: the straight
        // segment runs along the axis, which does not connect the sides.
        if (p.re == 0.0 && q.re == 0.0) blocked = true;
    }
    if (!blocked) return dist(zp, zq);
    return dist(zp, tip) + dist(tip, zq);
}

double contour_arc_length(const Contour& c) {
    double L = 0.0;
    for (std::size_t i = 1; i < c.vertices.size(); ++i)
        L += std::abs(c.vertices[i].value() - c.vertices[i - 1].value());
    if (c.closed_flag && c.vertices.size() > 2)
        L += std::abs(c.vertices.front().value() - c.vertices.back().value());
    return L;
}

void validate_contour(const Contour& c, double spike_height) {
    if (c.vertices.size() < 2) throw std::invalid_argument("contour needs at least 2 vertices");
    for (const auto& v : c.vertices) validate_slit_point(v, spike_height);
    for (std::size_t i = 1; i < c.vertices.size(); ++i) {
        if (c.vertices[i].value() == c.vertices[i - 1].value())
            throw std::invalid_argument("contour has coincident consecutive vertices");
    }
    const double L = contour_arc_length(c);
    if (!(L > 0.0) || !std::isfinite(L))
        throw std::invalid_argument("contour arc length must be finite and positive");
}

Contour make_default_arc(double spike_height, double eps, double width, double height,
                         int n_vertices) {
    Contour c;
    c.vertices.reserve(static_cast<std::size_t>(n_vertices));
    const double pi = 3.14159265358979323846;
    for (int k = 0; k < n_vertices; ++k) {
        const double th = pi * static_cast<double>(k) / (n_vertices - 1);
        // th = 0 starts at (eps, 0); the arch bulges to `width` at mid height
        // and crosses the axis at `height` above the tip.
        const double x = std::cos(th) * (eps + (width - eps) * std::sin(th));
        const double y = height * std::sin(th);
        c.vertices.emplace_back(x, y);
    }
    c.vertices.front() = SlitPoint(eps, 0.0);
    c.vertices.back() = SlitPoint(-eps, 0.0);
    c.endpoint_anchors = {c.vertices.front(), c.vertices.back()};
    c.closed_flag = false;
    validate_contour(c, spike_height);
    return c;
}

std::vector<SlitPoint> spike_contacts(const Contour& c, double spike_height, double tol) {
    std::vector<SlitPoint> out;
    for (const auto& v : c.vertices) {
        if (v.im <= 0.0) continue;
        const double d = distance_to_vertical_segment(v.value(), 0.0, spike_height);
        if (d <= tol && v.im <= spike_height + tol) {
            SlitPoint contact(0.0, std::clamp(v.im, 1e-300, spike_height),
                              v.re >= 0.0 ? SpikeSide::right : SpikeSide::left);
            out.push_back(contact);
        }
    }
    return out;
}

}  // namespace descent
