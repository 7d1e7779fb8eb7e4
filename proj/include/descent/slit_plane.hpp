#pragma once

#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace descent {

using Complex = std::complex<double>;

/// Which side of the slit a point sits on. The slit is the vertical
/// segment {Re z = 0, 0 < Im z <= A}; its two sides are distinct points
/// of the domain, so a tag is needed to disambiguate locations on it.
enum class SpikeSide { off_spike, left, right };

struct SlitPoint {
    double re = 0.0;
    double im = 0.0;
    SpikeSide side = SpikeSide::off_spike;

    SlitPoint() = default;
    SlitPoint(double re_, double im_, SpikeSide side_ = SpikeSide::off_spike)
        : re(re_), im(im_), side(side_) {}
    explicit SlitPoint(Complex z, SpikeSide side_ = SpikeSide::off_spike)
        : re(z.real()), im(z.imag()), side(side_) {}

    Complex value() const { return {re, im}; }
    bool on_axis() const { return im == 0.0; }
};

/// Validates the invariants of a slit point for ambient spike height A.
void validate_slit_point(const SlitPoint& p, double spike_height);

/// True if the straight segment from a to b is blocked by the slit
/// {0}x[0, A). Passing exactly through the tip iA is allowed; passing
/// through the origin is not (its two sides are distinct points).
bool segment_blocked_by_spike(Complex a, Complex b, double spike_height);

/// Geodesic distance in the slit upper half-plane. Pairs separated by
/// the slit are joined through the tip iA; everything else is Euclidean.
/// Points on the slit use their side tag to decide separation, so two
/// points at the same location on opposite sides are 2*(distance to tip)
/// apart.
double slit_distance(const SlitPoint& p, const SlitPoint& q, double spike_height);

/// Oriented piecewise-linear continuum joining the two sides of the
/// origin. The first and last vertices are the endpoint anchors, offset
/// by a small eps from 0+ and 0-.
struct Contour {
    std::vector<SlitPoint> vertices;
    std::pair<SlitPoint, SlitPoint> endpoint_anchors;
    bool closed_flag = false;

    std::size_t size() const { return vertices.size(); }
};

double contour_arc_length(const Contour& c);

/// Checks connectivity/degeneracy invariants; throws std::invalid_argument.
void validate_contour(const Contour& c, double spike_height);

/// Default open arc from (eps, 0) over the spike tip to (-eps, 0):
/// a rounded arch of half-width `width` and apex height `height`.
Contour make_default_arc(double spike_height, double eps, double width, double height,
                         int n_vertices = 33);

/// Vertices of `c` whose distance from the open spike is below `tol`.
std::vector<SlitPoint> spike_contacts(const Contour& c, double spike_height, double tol);

}  // namespace descent
