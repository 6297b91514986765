// kam.hpp: KAM contact transformations: exact exponential of the generator,
// single conjugation step, series cross-check and iteration.

#pragma once

#include "resonancekit/averaging.hpp"
#include "resonancekit/fock.hpp"
#include "resonancekit/spectrum.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace resonancekit {

// exp(W) for anti-Hermitian W, through the eigenphases of the Hermitian iW.
inline Matrix unitary_exp(const Matrix& w) {
    if (!is_anti_hermitian(w, 1e-10)) {
        throw std::invalid_argument("unitary_exp: generator is not anti-Hermitian");
    }
    const Complex i(0.0, 1.0);
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(i * w));
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("unitary_exp: eigensolver did not converge");
    }
    // W = -i (iW), so exp(W) = Q exp(-i lambda) Q^dag.
    const Vector phases = (-i * es.eigenvalues().cast<Complex>()).array().exp();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

struct KamStepReport {
    int step{0};
    double before{0.0};          // || V - Pi V ||_2
    double after{0.0};           // || V_new - Pi_{H0+D} V_new ||_2
    double contraction{0.0};     // after / before (0 when before = 0)
    bool diverged{false};        // after > before
    double generator_norm{0.0};  // || W ||_2
    bool generator_exceeded{false};
    double epsilon{1.0};
};

struct KamStep {
    Matrix h_new;
    Matrix d;
    Matrix v_new;
    Matrix w;
    KamStepReport report;
};

inline double off_block_norm(const Matrix& v, const EigenDecomposition& decomp, const DegeneracyClusters& clusters) {
    return hermitian_norm(v - project_average(v, decomp, clusters));
}

inline EigenDecomposition reference_decomposition(const Matrix& h0) {
    Matrix off = h0;
    off.diagonal().setZero();
    if (off.size() > 0 && off.cwiseAbs().maxCoeff() == 0.0) {
        return diagonal_decomposition(h0);
    }
    return eigh(h0);
}

// One conjugation H_new = exp(-W) (H0 + V) exp(W) with W from the cohomological equation.
inline KamStep kam_step(const Matrix& h0, const Matrix& v, const EigenDecomposition& decomp,
                        const DegeneracyClusters& clusters, double w_max = 10.0, int step_index = 0,
                        double epsilon = 1.0) {
    if (!is_hermitian(h0, 1e-10) || !is_hermitian(v, 1e-10)) {
        throw std::invalid_argument("kam_step: H0 and V must be Hermitian");
    }
    KamStep s;
    s.d = project_average(v, decomp, clusters);
    s.w = solve_cohomological(v, decomp, clusters);
    const Matrix u = unitary_exp(s.w);
    s.h_new = hermitian_part(u.adjoint() * (h0 + v) * u);
    s.v_new = s.h_new - h0 - s.d;

    const Matrix reference = hermitian_part(h0 + s.d);
    const EigenDecomposition ref_decomp = reference_decomposition(reference);
    const DegeneracyClusters ref_clusters = cluster_degeneracies(ref_decomp, clusters.tol_deg);

    KamStepReport& r = s.report;
    r.step = step_index;
    r.epsilon = epsilon;
    r.before = hermitian_norm(v - s.d);
    r.after = off_block_norm(s.v_new, ref_decomp, ref_clusters);
    r.contraction = r.before > 0.0 ? r.after / r.before : 0.0;
    r.diverged = r.after > r.before;
    r.generator_norm = hermitian_norm(Complex(0.0, 1.0) * s.w);
    r.generator_exceeded = r.generator_norm > w_max;
    return s;
}

namespace detail {

// L_W B = [B, W]
inline Matrix lie(const Matrix& b, const Matrix& w) { return b * w - w * b; }

}  // namespace detail

// Series form of the conjugated operator,
//   H0 + D + sum_{m=2}^{m_max} ((m-1) L^{m-1} V + L^{m-1} D) / m!,
// valid when W solves the cohomological equation for (H0, V, D).
inline Matrix kam_conjugate_series(const Matrix& h0, const Matrix& v, const Matrix& d, const Matrix& w,
                                   int m_max = 12) {
    if (m_max < 1) {
        throw std::invalid_argument("kam_conjugate_series: m_max must be >= 1");
    }
    Matrix out = h0 + d;
    Matrix lv = v;
    Matrix ld = d;
    double factorial = 1.0;
    for (int m = 2; m <= m_max; ++m) {
        lv = detail::lie(lv, w);
        ld = detail::lie(ld, w);
        factorial *= static_cast<double>(m);
        out += (static_cast<double>(m - 1) * lv + ld) / factorial;
    }
    return out;
}

struct KamOptions {
    int max_steps{1};
    double stop_tol{1e-12};  // relative to ||H0||
    double tol_deg{1e-8};
    double w_max{10.0};
};

struct KamResult {
    EigenDecomposition estimate;  // of the block-diagonal part of the final operator
    Matrix reference;             // renormalized reference H0 + D + ...
    Matrix perturbation;          // remaining perturbation
    std::vector<KamStepReport> reports;
    bool converged{false};
    bool diverged{false};
};

inline KamResult kam_iterate(const Matrix& h0, const Matrix& v, const KamOptions& options = {}) {
    if (options.max_steps < 1) {
        throw std::invalid_argument("kam_iterate: max_steps must be >= 1");
    }
    KamResult out;
    Matrix reference = h0;
    Matrix perturbation = v;
    const double scale = std::max(hermitian_norm(h0), 1e-300);
    for (int step = 0; step < options.max_steps; ++step) {
        const EigenDecomposition decomp = reference_decomposition(reference);
        const DegeneracyClusters clusters = cluster_degeneracies(decomp, options.tol_deg);
        if (off_block_norm(perturbation, decomp, clusters) <= options.stop_tol * scale) {
            out.converged = true;
            break;
        }
        KamStep s = kam_step(reference, perturbation, decomp, clusters, options.w_max, step);
        out.reports.push_back(s.report);
        reference = hermitian_part(reference + s.d);
        perturbation = s.v_new;
        if (s.report.diverged || s.report.generator_exceeded) {
            out.diverged = true;
            break;
        }
    }
    const EigenDecomposition decomp = reference_decomposition(reference);
    const DegeneracyClusters clusters = cluster_degeneracies(decomp, options.tol_deg);
    if (!out.diverged && !out.converged &&
        off_block_norm(perturbation, decomp, clusters) <= options.stop_tol * scale) {
        out.converged = true;
    }
    out.estimate = eigh(hermitian_part(reference + project_average(perturbation, decomp, clusters)));
    out.reference = reference;
    out.perturbation = perturbation;
    return out;
}

}  // namespace resonancekit
