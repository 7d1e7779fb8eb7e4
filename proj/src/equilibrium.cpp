#include "descent/equilibrium.hpp"

#include <algorithm>
#include <cmath>

namespace descent {

namespace {

double qp_value(const Eigen::MatrixXd& K, const Eigen::VectorXd& q, const Eigen::VectorXd& w) {
    return w.dot(K * w) + 2.0 * q.dot(w);
}

Eigen::VectorXd project_box(Eigen::VectorXd w, const std::optional<Eigen::VectorXd>& cap) {
    w = w.cwiseMax(0.0);
    if (cap) w = w.cwiseMin(*cap);
    return w;
}

// KKT residual of the box QP in (on-support, off-support) form.
std::pair<double, double> qp_kkt(const Eigen::MatrixXd& K, const Eigen::VectorXd& q,
                                 const Eigen::VectorXd& w, double support_tol) {
    const Eigen::VectorXd r = K * w + q;
    double on = 0.0, off = 0.0;
    const double wmax = w.maxCoeff();
    const double thr = support_tol * std::max(wmax, 0.0);
    bool any_off = false;
    for (Eigen::Index j = 0; j < w.size(); ++j) {
        if (w[j] > thr)
            on = std::max(on, std::abs(r[j]));
        else {
            off = any_off ? std::min(off, r[j]) : r[j];
            any_off = true;
        }
    }
    if (!any_off) off = 0.0;
    return {on, off};
}

}  // namespace

QpResult solve_nonneg_qp(const Eigen::MatrixXd& K, const Eigen::VectorXd& q,
                         const SolverOptions& opts, const std::optional<Eigen::VectorXd>& cap) {
    const Eigen::Index n = q.size();
    QpResult res;
    Eigen::VectorXd w;
    if (!opts.init_weights.empty()) {
        if (static_cast<Eigen::Index>(opts.init_weights.size()) != n)
            throw std::invalid_argument("init_weights length mismatch");
        w = project_box(
            Eigen::Map<const Eigen::VectorXd>(opts.init_weights.data(), n), cap);
    } else {
        w = Eigen::VectorXd::Zero(n);
    }

    double val = qp_value(K, q, w);
    res.history.push_back(val);

    Eigen::VectorXd g = 2.0 * (K * w + q);
    double step = 1.0 / std::max(1.0, K.diagonal().maxCoeff());
    Eigen::VectorXd w_prev = w, g_prev = g;

    int it = 0;
    for (; it < opts.max_iter; ++it) {
        // Projected gradient trial with a monotone Armijo backtrack.
        double alpha = step;
        Eigen::VectorXd w_new;
        double val_new = val;
        bool accepted = false;
        for (int bt = 0; bt < 40; ++bt) {
            w_new = project_box(w - alpha * g, cap);
            const Eigen::VectorXd d = w_new - w;
            const double dn = d.norm();
            if (dn == 0.0) break;
            val_new = qp_value(K, q, w_new);
            if (val_new <= val + 1e-4 * g.dot(d)) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) break;  // stationary within line-search resolution

        w_prev.swap(w);
        g_prev.swap(g);
        w = w_new;
        g = 2.0 * (K * w + q);
        res.history.push_back(val_new);

        const double improve = val - val_new;
        val = val_new;

        // Barzilai-Borwein step for the next round.
        const Eigen::VectorXd s = w - w_prev;
        const Eigen::VectorXd y = g - g_prev;
        const double sy = s.dot(y);
        step = (sy > 1e-300) ? std::clamp(s.dot(s) / sy, 1e-12, 1e12) : 2.0 * step;

        auto [on, off] = qp_kkt(K, q, w, opts.support_threshold);
        if (on <= opts.kkt_tol && off >= -opts.kkt_tol) break;
        if (improve >= 0.0 && improve <= opts.energy_tol * std::max(1.0, std::abs(val)) &&
            it > 20 && on <= 1e3 * opts.kkt_tol && off >= -1e3 * opts.kkt_tol)
            break;
    }

    // Active-set polish: solve the unconstrained system on the working
    // support, guarded so the energy never increases.
    for (int round = 0; round < 60; ++round) {
        const double wmax = w.maxCoeff();
        const Eigen::VectorXd r = K * w + q;
        std::vector<Eigen::Index> S;
        for (Eigen::Index j = 0; j < n; ++j) {
            const bool at_cap = cap && w[j] >= (*cap)[j] * (1.0 - 1e-12);
            if (at_cap) continue;
            if (w[j] > opts.support_threshold * std::max(wmax, 1e-300) ||
                r[j] < -opts.kkt_tol)
                S.push_back(j);
        }
        if (S.empty()) break;
        Eigen::MatrixXd Ks(S.size(), S.size());
        Eigen::VectorXd qs(S.size());
        for (std::size_t a = 0; a < S.size(); ++a) {
            qs[a] = q[S[a]];
            if (cap) {
                // Keep capped nodes' influence in the linear term.
                for (Eigen::Index j = 0; j < n; ++j)
                    if (cap && w[j] >= (*cap)[j] * (1.0 - 1e-12))
                        qs[a] += K(S[a], j) * w[j];
            }
            for (std::size_t b = 0; b < S.size(); ++b) Ks(a, b) = K(S[a], S[b]);
        }
        Eigen::LDLT<Eigen::MatrixXd> ldlt(Ks);
        Eigen::VectorXd xs = ldlt.solve(-qs);
        if (!xs.allFinite()) break;
        Eigen::VectorXd w_try = Eigen::VectorXd::Zero(n);
        if (cap)
            for (Eigen::Index j = 0; j < n; ++j)
                if (w[j] >= (*cap)[j] * (1.0 - 1e-12)) w_try[j] = w[j];
        for (std::size_t a = 0; a < S.size(); ++a) w_try[S[a]] = xs[a];
        w_try = project_box(w_try, cap);
        const double val_try = qp_value(K, q, w_try);
        if (val_try <= val + 1e-14 * std::max(1.0, std::abs(val))) {
            const bool moved = (w_try - w).lpNorm<Eigen::Infinity>() > 1e-16;
            w = w_try;
            val = std::min(val, val_try);
            res.history.push_back(val);
            auto [on, off] = qp_kkt(K, q, w, opts.support_threshold);
            if ((on <= opts.kkt_tol && off >= -opts.kkt_tol) || !moved) break;
        } else {
            break;
        }
        ++it;
    }

    res.clamp_magnitude = std::max(0.0, -w.minCoeff());
    res.w = w.cwiseMax(0.0);
    res.value = qp_value(K, q, res.w);
    res.iterations = it;
    return res;
}

namespace {

BandStructure bands_from_mask(const std::vector<bool>& mask, bool zero_measure) {
    BandStructure bs;
    const int n = static_cast<int>(mask.size());
    int i = 0;
    while (i < n) {
        if (mask[i]) {
            int j = i;
            while (j + 1 < n && mask[j + 1]) ++j;
            bs.bands.emplace_back(i, j);
            i = j + 1;
        } else {
            int j = i;
            while (j + 1 < n && !mask[j + 1]) ++j;
            bs.gaps.emplace_back(i, j);
            i = j + 1;
        }
    }
    if (zero_measure || bs.bands.empty())
        bs.genus = std::nullopt;
    else
        bs.genus = static_cast<int>(bs.bands.size()) - 1;
    return bs;
}

EquilibriumSolution finish_solution(Contour contour, DiscreteMeasure mu, const FieldSpec& f,
                                    QpResult qp, const SolverOptions& opts) {
    EquilibriumSolution sol;
    sol.contour = std::move(contour);
    for (Eigen::Index j = 0; j < qp.w.size(); ++j) mu.weights[j] = qp.w[j];
    sol.measure = std::move(mu);
    sol.field = f;
    sol.iterations = qp.iterations;
    sol.energy_history = std::move(qp.history);
    sol.clamp_magnitude = qp.clamp_magnitude;
    sol.point_mass_diagonal = opts.point_mass_diagonal;

    const double wmax = qp.w.maxCoeff();
    sol.support_mask.resize(sol.measure.size());
    for (std::size_t j = 0; j < sol.measure.size(); ++j)
        sol.support_mask[j] = sol.measure.weights[j] > opts.support_threshold * std::max(wmax, 0.0) &&
                              sol.measure.weights[j] > 0.0;
    sol.bands = bands_from_mask(sol.support_mask, wmax <= 0.0);

    // Recomputation identity: the reported energy is the public functional.
    if (sol.measure.kind == MeasureKind::density)
        sol.energy_value = weighted_energy(sol.measure, f);
    else
        sol.energy_value = qp.value;

    auto [on, off] = kkt_residual(sol, f);
    sol.kkt_on_support = on;
    sol.kkt_off_support = off;
    return sol;
}

Eigen::MatrixXd kernel_for(const DiscreteMeasure& mu, const SolverOptions& opts) {
    if (mu.kind == MeasureKind::point_mass) {
        if (!opts.point_mass_diagonal)
            throw std::invalid_argument(
                "point-mass equilibrium needs opts.point_mass_diagonal (infinite self-energy)");
        const auto n = static_cast<Eigen::Index>(mu.size());
        Eigen::MatrixXd K(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            K(i, i) = *opts.point_mass_diagonal;
            for (Eigen::Index j = i + 1; j < n; ++j) {
                const double g = green(mu.nodes[i], mu.nodes[j]);
                K(i, j) = g;
                K(j, i) = g;
            }
        }
        return K;
    }
    return energy_kernel_matrix(mu);
}

QpResult run_qp(const DiscreteMeasure& mu, const FieldSpec& f, const SolverOptions& opts) {
    const auto n = static_cast<Eigen::Index>(mu.size());
    const Eigen::MatrixXd K = kernel_for(mu, opts);
    Eigen::VectorXd q(n);
    for (Eigen::Index j = 0; j < n; ++j) q[j] = external_field(mu.nodes[j], f);
    std::optional<Eigen::VectorXd> cap;
    if (opts.density_cap && mu.kind == MeasureKind::density) {
        Eigen::VectorXd c(n);
        for (Eigen::Index j = 0; j < n; ++j) c[j] = *opts.density_cap * mu.cell_lengths[j];
        cap = c;
    }
    return solve_nonneg_qp(K, q, opts, cap);
}

}  // namespace

EquilibriumSolution solve_equilibrium(const Contour& contour, const FieldSpec& f,
                                      const SolverOptions& opts) {
    validate_field(f);
    if (opts.mesh_nodes < 8) throw std::invalid_argument("need at least 8 mesh nodes");
    DiscreteMeasure mu = mesh_contour(contour, opts.mesh_nodes);
    QpResult qp = run_qp(mu, f, opts);

    if (opts.band_refine) {
        // Re-mesh with clustering at detected band edges and solve again.
        const double wmax = qp.w.maxCoeff();
        std::vector<double> edges;
        double s = 0.0;
        std::vector<double> pos(mu.size());
        for (std::size_t j = 0; j < mu.size(); ++j) {
            pos[j] = s + 0.5 * mu.cell_lengths[j];
            s += mu.cell_lengths[j];
        }
        bool prev = false;
        for (std::size_t j = 0; j < mu.size(); ++j) {
            const bool cur = qp.w[j] > 1e-3 * std::max(wmax, 0.0);
            if (cur != prev && j > 0) edges.push_back(pos[j]);
            prev = cur;
        }
        if (!edges.empty()) {
            DiscreteMeasure mu2 = mesh_contour_refined(contour, opts.mesh_nodes, edges);
            QpResult qp2 = run_qp(mu2, f, opts);
            return finish_solution(contour, std::move(mu2), f, std::move(qp2), opts);
        }
    }
    return finish_solution(contour, std::move(mu), f, std::move(qp), opts);
}

EquilibriumSolution solve_equilibrium_nodes(const std::vector<SlitPoint>& nodes,
                                            const FieldSpec& f, const SolverOptions& opts) {
    validate_field(f);
    DiscreteMeasure mu = make_point_masses(nodes, std::vector<double>(nodes.size(), 0.0));
    QpResult qp = run_qp(mu, f, opts);
    Contour trivial;
    trivial.vertices = nodes;
    return finish_solution(std::move(trivial), std::move(mu), f, std::move(qp), opts);
}

std::pair<double, double> kkt_residual(const EquilibriumSolution& sol, const FieldSpec& f) {
    const auto n = static_cast<Eigen::Index>(sol.measure.size());
    Eigen::MatrixXd K;
    if (sol.measure.kind == MeasureKind::point_mass) {
        SolverOptions opts;
        opts.point_mass_diagonal = sol.point_mass_diagonal.value_or(1.0);
        K = kernel_for(sol.measure, opts);
    } else {
        K = energy_kernel_matrix(sol.measure);
    }
    Eigen::Map<const Eigen::VectorXd> w(sol.measure.weights.data(), n);
    Eigen::VectorXd r = K * w;
    for (Eigen::Index j = 0; j < n; ++j) r[j] += external_field(sol.measure.nodes[j], f);
    double on = 0.0, off = 0.0;
    bool any_on = false, any_off = false;
    for (Eigen::Index j = 0; j < n; ++j) {
        if (sol.support_mask[j]) {
            on = std::max(on, std::abs(r[j]));
            any_on = true;
        } else {
            off = any_off ? std::min(off, r[j]) : r[j];
            any_off = true;
        }
    }
    if (!any_on) on = 0.0;
    if (!any_off) off = 0.0;
    return {on, off};
}

BandStructure classify_bands(const EquilibriumSolution& sol, double threshold) {
    const double wmax =
        sol.measure.weights.empty()
            ? 0.0
            : *std::max_element(sol.measure.weights.begin(), sol.measure.weights.end());
    std::vector<bool> mask(sol.measure.size(), false);
    for (std::size_t j = 0; j < sol.measure.size(); ++j)
        mask[j] = wmax > 0.0 && sol.measure.weights[j] > threshold * wmax;
    return bands_from_mask(mask, wmax <= 0.0);
}

Complex g_function(Complex z, const EquilibriumSolution& sol, GFunctionMode mode) {
    const auto& mu = sol.measure;
    for (std::size_t j = 0; j < mu.size(); ++j) {
        if (mu.weights[j] > 0.0 &&
            std::abs(z - mu.nodes[j].value()) < 0.45 * mu.cell_lengths[j])
            throw OnSupportError("g_function: on-support evaluation");
    }
    Complex g(0.0, 0.0);
    for (std::size_t j = 0; j < mu.size(); ++j) {
        const double w = mu.weights[j];
        if (w == 0.0) continue;
        const Complex eta = mu.nodes[j].value();
        g += w * std::log(z - eta);
        if (mode == GFunctionMode::symmetrized) g -= w * std::log(z - std::conj(eta));
    }
    return g;
}

}  // namespace descent
