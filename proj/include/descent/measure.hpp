#pragma once

#include <vector>

#include "descent/slit_plane.hpp"

namespace descent {

enum class MeasureKind { density, point_mass };

/// Quadrature representation of a positive Borel measure: nodes carry the
/// total mass of the arc-length cell they stand for. Density-type measures
/// additionally know the straight cell each node represents, which makes
/// cell-exact potential evaluation possible.
struct DiscreteMeasure {
    MeasureKind kind = MeasureKind::density;
    std::vector<SlitPoint> nodes;
    std::vector<double> weights;       // cell masses, >= 0
    std::vector<double> cell_lengths;  // arc length per cell, > 0 for density type
    std::vector<Complex> cell_a;       // cell segment endpoints (density type)
    std::vector<Complex> cell_b;

    std::size_t size() const { return nodes.size(); }
    bool empty() const { return nodes.empty(); }
    double total_mass() const;
    bool has_cell_geometry() const { return cell_a.size() == nodes.size() && !nodes.empty(); }
};

void validate_measure(const DiscreteMeasure& mu);

DiscreteMeasure make_point_masses(const std::vector<SlitPoint>& nodes,
                                  const std::vector<double>& weights);

/// Uniform-density measure on the straight segment [a, b] split into n cells.
DiscreteMeasure make_uniform_density_segment(Complex a, Complex b, int n, double density = 1.0);

/// Meshes a contour into n cells with square-root clustering toward both
/// endpoints (band-edge densities behave like square roots, and so do the
/// cell sizes that resolve them). Weights start at zero; callers fill them.
DiscreteMeasure mesh_contour(const Contour& c, int n);

/// As mesh_contour, but additionally clusters nodes toward the interior
/// break points listed in `refine_at` (arc-length positions in [0, L]).
DiscreteMeasure mesh_contour_refined(const Contour& c, int n, const std::vector<double>& refine_at);

}  // namespace descent
