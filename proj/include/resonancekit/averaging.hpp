// averaging.hpp: Averaging projector over degeneracy clusters of a reference
// operator, the matching generator W, resonance classification and
// effective-Hamiltonian assembly.

#pragma once

#include "resonancekit/fock.hpp"
#include "resonancekit/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace resonancekit {

struct DegeneracyClusters {
    std::vector<std::vector<int>> clusters;  // level indices, ascending energy
    std::vector<double> mean_energy;
    std::vector<int> cluster_of;             // level index -> cluster id
    std::vector<bool> active;                // filled by classify_resonances
    double tol_deg{1e-8};
    double tol_active{0.0};

    std::size_t size() const noexcept { return clusters.size(); }
};

struct ResonanceInfo {
    int cluster{0};
    bool active{false};
    double coupling{0.0};  // in-cluster coupling magnitude
};

struct AveragingResult {
    Matrix d;  // block-diagonal average
    Matrix w;  // anti-Hermitian generator
    std::vector<ResonanceInfo> resonances;
};

// Greedy gap clustering: a new cluster starts whenever the gap to the
// previous (sorted) eigenvalue exceeds tol_deg.
inline DegeneracyClusters cluster_degeneracies(const EigenDecomposition& decomp, double tol_deg) {
    if (!(tol_deg > 0.0)) {
        throw std::invalid_argument("cluster_degeneracies: tol_deg must be > 0");
    }
    const int n = static_cast<int>(decomp.size());
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return decomp.values(a) < decomp.values(b); });
    DegeneracyClusters out;
    out.tol_deg = tol_deg;
    out.cluster_of.assign(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
        const int k = order[static_cast<std::size_t>(i)];
        if (i == 0 || decomp.values(k) - decomp.values(order[static_cast<std::size_t>(i - 1)]) > tol_deg) {
            out.clusters.emplace_back();
        }
        out.clusters.back().push_back(k);
        out.cluster_of[static_cast<std::size_t>(k)] = static_cast<int>(out.clusters.size()) - 1;
    }
    for (const auto& c : out.clusters) {
        double sum = 0.0;
        for (const int k : c) {
            sum += decomp.values(k);
        }
        out.mean_energy.push_back(sum / static_cast<double>(c.size()));
    }
    out.active.assign(out.clusters.size(), false);
    return out;
}

namespace detail {

inline void check_dims(const Matrix& v, const EigenDecomposition& decomp, const DegeneracyClusters& clusters,
                       const char* who) {
    if (v.rows() != v.cols() || v.rows() != decomp.vectors.rows() || decomp.vectors.cols() != v.cols()) {
        throw std::invalid_argument(std::string(who) + ": dimension mismatch");
    }
    if (clusters.cluster_of.size() != static_cast<std::size_t>(v.rows())) {
        throw std::invalid_argument(std::string(who) + ": clusters do not match the decomposition");
    }
}

inline bool is_identity_basis(const Matrix& q) {
    return q.isIdentity(0.0);
}

inline Matrix to_eigenbasis(const Matrix& v, const Matrix& q) {
    return is_identity_basis(q) ? v : Matrix(q.adjoint() * v * q);
}

inline Matrix from_eigenbasis(const Matrix& v, const Matrix& q) {
    return is_identity_basis(q) ? v : Matrix(q * v * q.adjoint());
}

}  // namespace detail

// D = Pi_{H0} V: in-cluster blocks of V in the eigenbasis, returned in the original basis.
inline Matrix project_average(const Matrix& v, const EigenDecomposition& decomp, const DegeneracyClusters& clusters) {
    detail::check_dims(v, decomp, clusters, "project_average");
    const Matrix vt = detail::to_eigenbasis(v, decomp.vectors);
    Matrix dt = Matrix::Zero(v.rows(), v.cols());
    for (const auto& c : clusters.clusters) {
        for (const int i : c) {
            for (const int j : c) {
                dt(i, j) = vt(i, j);
            }
        }
    }
    return detail::from_eigenbasis(dt, decomp.vectors);
}

// Solves [H0, W] + V - D = 0 for W with zero in-cluster blocks.
inline Matrix solve_cohomological(const Matrix& v, const EigenDecomposition& decomp,
                                  const DegeneracyClusters& clusters) {
    detail::check_dims(v, decomp, clusters, "solve_cohomological");
    const Matrix vt = detail::to_eigenbasis(v, decomp.vectors);
    const Eigen::Index n = v.rows();
    Matrix wt = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (clusters.cluster_of[static_cast<std::size_t>(i)] == clusters.cluster_of[static_cast<std::size_t>(j)]) {
                continue;
            }
            const double gap = decomp.values(i) - decomp.values(j);
            if (std::abs(gap) <= clusters.tol_deg) {
                throw std::runtime_error("solve_cohomological: degenerate pair split across clusters");
            }
            wt(i, j) = -vt(i, j) / gap;
        }
    }
    return detail::from_eigenbasis(wt, decomp.vectors);
}

// A cluster is active when V restricted to it is not a multiple of the
// identity, measured as || B - tr(B)/k ||_2 with B the in-cluster block. This
// equals the largest off-diagonal coupling for a 2-level cluster up to a
// factor and does not depend on the basis chosen inside the cluster.
inline std::vector<ResonanceInfo> classify_resonances(const Matrix& v, const EigenDecomposition& decomp,
                                                      DegeneracyClusters& clusters, double tol_active) {
    detail::check_dims(v, decomp, clusters, "classify_resonances");
    const Matrix vt = detail::to_eigenbasis(v, decomp.vectors);
    std::vector<ResonanceInfo> out;
    clusters.tol_active = tol_active;
    clusters.active.assign(clusters.size(), false);
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        const auto& idx = clusters.clusters[c];
        const auto k = static_cast<Eigen::Index>(idx.size());
        double coupling = 0.0;
        if (k > 1) {
            Matrix b(k, k);
            for (Eigen::Index i = 0; i < k; ++i) {
                for (Eigen::Index j = 0; j < k; ++j) {
                    b(i, j) = vt(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
                }
            }
            const Complex mean = b.trace() / static_cast<double>(k);
            b.diagonal().array() -= mean;
            coupling = hermitian_norm(b);
        }
        const bool active = coupling > tol_active;
        clusters.active[c] = active;
        out.push_back(ResonanceInfo{static_cast<int>(c), active, coupling});
    }
    return out;
}

inline AveragingResult average(const Matrix& v, const EigenDecomposition& decomp, DegeneracyClusters& clusters,
                               double tol_active) {
    AveragingResult r;
    r.d = project_average(v, decomp, clusters);
    r.w = solve_cohomological(v, decomp, clusters);
    r.resonances = classify_resonances(v, decomp, clusters, tol_active);
    return r;
}

// H_eff = H0 + Pi_{H0} V
inline Matrix build_effective(const Matrix& h0, const Matrix& v, const EigenDecomposition& decomp,
                              const DegeneracyClusters& clusters) {
    if (h0.rows() != v.rows() || h0.cols() != v.cols()) {
        throw std::invalid_argument("build_effective: dimension mismatch");
    }
    return h0 + project_average(v, decomp, clusters);
}

// Basis slots covered by the degeneracy clusters of a family of reference
// operators. Slot i belongs to a cluster when its weight in the cluster
// projector exceeds 1/2; mask(i, j) is set when i and j share a cluster of
// some member.
inline Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> combined_support(const std::vector<Matrix>& family,
                                                                            double tol_deg = 1e-8) {
    if (family.empty()) {
        throw std::invalid_argument("combined_support: empty family");
    }
    const Eigen::Index n = family.front().rows();
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask =
        Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, n, false);
    for (const Matrix& member : family) {
        if (member.rows() != n || member.cols() != n) {
            throw std::invalid_argument("combined_support: family members differ in dimension");
        }
        if (!is_hermitian(member, 1e-10)) {
            throw std::invalid_argument("combined_support: family member is not Hermitian");
        }
        Matrix off = member;
        off.diagonal().setZero();
        const bool diagonal = off.cwiseAbs().maxCoeff() == 0.0;
        const EigenDecomposition d = diagonal ? diagonal_decomposition(member) : eigh(member);
        const DegeneracyClusters cl = cluster_degeneracies(d, tol_deg);
        for (const auto& c : cl.clusters) {
            std::vector<Eigen::Index> slots;
            if (diagonal) {
                slots.assign(c.begin(), c.end());
            } else {
                Eigen::VectorXd weight = Eigen::VectorXd::Zero(n);
                for (const int k : c) {
                    weight += d.vectors.col(k).cwiseAbs2();
                }
                for (Eigen::Index i = 0; i < n; ++i) {
                    if (weight(i) > 0.5) {
                        slots.push_back(i);
                    }
                }
            }
            for (const Eigen::Index i : slots) {
                for (const Eigen::Index j : slots) {
                    mask(i, j) = true;
                }
            }
        }
    }
    return mask;
}

inline Matrix apply_support(const Matrix& v, const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& mask) {
    if (mask.rows() != v.rows() || mask.cols() != v.cols()) {
        throw std::invalid_argument("apply_support: dimension mismatch");
    }
    return mask.select(v, Matrix::Zero(v.rows(), v.cols()));
}

// Sum of the in-cluster extractions of V over a family of references, each
// matrix position counted once.
inline Matrix combined_projector(const Matrix& v, const std::vector<Matrix>& family, double tol_deg = 1e-8) {
    return apply_support(v, combined_support(family, tol_deg));
}

}  // namespace resonancekit
