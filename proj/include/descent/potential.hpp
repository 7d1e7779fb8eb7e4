#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "descent/field.hpp"
#include "descent/measure.hpp"

namespace descent {

struct SingularKernelError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Green's function of the upper half-plane, G(z; eta) = log(|z - eta*| / |z - eta|).
/// Throws SingularKernelError on coincident points; the caller owns the
/// diagonal convention.
double green(const SlitPoint& z, const SlitPoint& eta);
double green(Complex z, Complex eta);

enum class NodePolicy { error, regularize };

/// Green potential V^mu(z) = sum_j w_j G(z, node_j). If z coincides with a
/// node of a density-type measure and policy is regularize, that node's term
/// is replaced by the exact cell average of the kernel.
double green_potential(const SlitPoint& z, const DiscreteMeasure& mu,
                       NodePolicy policy = NodePolicy::regularize);

/// Cell-exact Green potential of a density measure: every cell contributes
/// the exact integral of the kernel over its straight segment. Finite and
/// continuous up to the support; needed by probes that approach it.
double green_potential_cellwise(Complex z, const DiscreteMeasure& mu);

/// Quadratic Green energy E(mu) with midpoint off-diagonal terms and the
/// analytic self-cell correction on the diagonal. Density measures only.
double energy(const DiscreteMeasure& mu);

/// E(mu) + 2 int phi dmu with the same quadrature convention.
double weighted_energy(const DiscreteMeasure& mu, const FieldSpec& f);

/// Kernel matrix of the discrete energy form: K(i,j) = G(x_i, x_j) off the
/// diagonal and the self-cell correction on it, so energy = w' K w.
Eigen::MatrixXd energy_kernel_matrix(const DiscreteMeasure& mu);

/// Self-cell correction c_i = log(2 Im x_i) - log(l_i) + 3/2 (exact integral
/// of the -log|x-y| part over a straight cell, midpoint for the reflected part).
double self_cell_correction(const SlitPoint& node, double cell_length);

/// Exact integral of log|z - eta| |d eta| over the straight segment [a, b].
/// Finite for z on the segment (the log singularity is integrable).
double segment_log_integral(Complex z, Complex a, Complex b);

}  // namespace descent
