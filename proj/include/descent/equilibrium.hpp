#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "descent/potential.hpp"

namespace descent {

struct SolverOptions {
    int max_iter = 4000;
    double energy_tol = 1e-12;       // stall tolerance on the energy sequence
    double kkt_tol = 1e-10;          // target first-order residual
    double support_threshold = 1e-8; // relative to max weight
    int mesh_nodes = 400;
    bool band_refine = false;        // second pass with nodes clustered at band edges
    std::optional<double> point_mass_diagonal;  // kernel diagonal for point-mass runs
    std::optional<double> density_cap;          // optional upper constraint on the density
    std::vector<double> init_weights;           // optional feasible start
};

struct BandStructure {
    std::vector<std::pair<int, int>> bands;  // inclusive node-index runs
    std::vector<std::pair<int, int>> gaps;
    std::optional<int> genus;  // nullopt for the zero measure
};

struct EquilibriumSolution {
    Contour contour;
    DiscreteMeasure measure;
    FieldSpec field;
    double energy_value = 0.0;
    double kkt_on_support = 0.0;
    double kkt_off_support = 0.0;
    std::vector<bool> support_mask;
    BandStructure bands;
    int iterations = 0;
    std::vector<double> energy_history;
    double clamp_magnitude = 0.0;  // largest negative weight clipped at exit
    std::optional<double> point_mass_diagonal;  // kernel diagonal used, point-mass runs
};

struct SolverFailure : std::runtime_error {
    EquilibriumSolution best;
    explicit SolverFailure(const std::string& what, EquilibriumSolution b)
        : std::runtime_error(what), best(std::move(b)) {}
};

/// Minimizes w' K w + 2 q' w over w >= 0 (optionally w <= cap elementwise):
/// projected Barzilai-Borwein descent with an Armijo safeguard, then an
/// active-set polish that solves the support system exactly.
struct QpResult {
    Eigen::VectorXd w;
    double value = 0.0;
    int iterations = 0;
    std::vector<double> history;
    double clamp_magnitude = 0.0;
};
QpResult solve_nonneg_qp(const Eigen::MatrixXd& K, const Eigen::VectorXd& q,
                         const SolverOptions& opts,
                         const std::optional<Eigen::VectorXd>& cap = std::nullopt);

/// Equilibrium measure of the field on a fixed contour: meshes, assembles the
/// energy kernel, and solves the nonnegative quadratic program.
EquilibriumSolution solve_equilibrium(const Contour& contour, const FieldSpec& f,
                                      const SolverOptions& opts = {});

/// Same inner problem on explicit point nodes with a prescribed kernel
/// diagonal (opts.point_mass_diagonal) instead of a meshed contour.
EquilibriumSolution solve_equilibrium_nodes(const std::vector<SlitPoint>& nodes,
                                            const FieldSpec& f, const SolverOptions& opts);

/// First-order optimality of the discrete problem: max |V + phi| over the
/// support and min (V + phi) off it, with V the kernel row sums.
std::pair<double, double> kkt_residual(const EquilibriumSolution& sol, const FieldSpec& f);

/// Maximal runs of nodes with weight > threshold * max weight.
BandStructure classify_bands(const EquilibriumSolution& sol, double threshold);

struct OnSupportError : std::domain_error {
    using std::domain_error::domain_error;
};

enum class GFunctionMode { upper_only, symmetrized };

/// Complex log potential g(z) = sum w_j log(z - eta_j), principal branch per
/// node; the symmetrized mode adds the mirror nodes with negative weight.
Complex g_function(Complex z, const EquilibriumSolution& sol,
                   GFunctionMode mode = GFunctionMode::symmetrized);

}  // namespace descent
