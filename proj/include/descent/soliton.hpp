#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

namespace descent {

using Complex = std::complex<double>;

/// Reflectionless spectral data of the semiclassical ensemble for amplitude
/// A: N purely imaginary eigenvalues i hbar (j + 1/2) with unimodular
/// alternating norming constants.
struct SolitonEnsemble {
    double A = 1.0;
    int N = 1;
    double hbar = 1.0;  // = A / N
    std::vector<Complex> eigenvalues;
    std::vector<double> norming;  // +-1 by default, configurable
};

SolitonEnsemble build_ensemble(double A, int N);
SolitonEnsemble build_ensemble(double A, int N, const std::vector<double>& norming);

struct ConditioningError : std::runtime_error {
    double condition_estimate;
    ConditioningError(const std::string& what, double cond)
        : std::runtime_error(what), condition_estimate(cond) {}
};

struct PsiValue {
    Complex psi;
    double condition_estimate = 1.0;  // linear-system condition x recovery cancellation
};

enum class RhAssembly { automatic, primal, dual };

/// Solves the discrete residue problem at (x, t) and returns
/// psi = 2i lim lambda M_12. Two algebraically equivalent assemblies are
/// available: the primal one carries exp(-2 Im(lambda_j) x / hbar) factors and
/// is stable for x >= 0; the dual one (gauge conjugation by the Blaschke
/// product of the eigenvalues) inverts the norming data and is stable for
/// x <= 0. `automatic` picks by the sign of x. Ill-conditioned evaluations
/// throw ConditioningError instead of returning garbage.
PsiValue evaluate_psi(const SolitonEnsemble& ens, double x, double t,
                      RhAssembly assembly = RhAssembly::automatic,
                      double condition_guard = 1e13);

/// L2 mass of psi over [-x_window, x_window] by composite Gauss-Legendre
/// quadrature with n_quad total nodes. Warns (via the return flag) when the
/// window edge value exceeds 1e-8.
struct MassResult {
    double mass = 0.0;
    double edge_value = 0.0;
    bool window_ok = true;
};
MassResult mass(const SolitonEnsemble& ens, double t, double x_window, int n_quad);

}  // namespace descent
