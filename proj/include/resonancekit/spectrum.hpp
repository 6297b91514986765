// spectrum.hpp: Exact-diagonalization oracle: eigensolver wrapper, parity
// labels, coupling sweeps and truncation validation.

#pragma once

#include "resonancekit/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace resonancekit {

enum class Parity { even, odd, unclassified, none };

inline std::string to_string(Parity p) {
    switch (p) {
        case Parity::even: return "even";
        case Parity::odd: return "odd";
        case Parity::unclassified: return "unclassified";
        case Parity::none: break;
    }
    return "n/a";
}

inline Parity parity_from_sign(double sign) { return sign > 0.0 ? Parity::even : Parity::odd; }

enum class Branch { plus, minus, unassigned };

inline std::string to_string(Branch b) {
    switch (b) {
        case Branch::plus: return "+";
        case Branch::minus: return "-";
        case Branch::unassigned: break;
    }
    return "unassigned";
}

inline Branch branch_of(Atom a) { return a == Atom::plus ? Branch::plus : Branch::minus; }

struct EigenDecomposition {
    RealVector values;            // ascending
    Matrix vectors;               // orthonormal columns
    std::vector<Parity> parity;   // Parity::none until classified

    Eigen::Index size() const noexcept { return values.size(); }
};

namespace detail {

inline Eigen::Index dominant_index(const Eigen::Ref<const Vector>& v) {
    Eigen::Index best = 0;
    v.cwiseAbs().maxCoeff(&best);
    return best;
}

inline double tie_tolerance(const RealVector& values) {
    const double scale = values.size() > 0 ? std::max(1.0, values.cwiseAbs().maxCoeff()) : 1.0;
    return 1e-10 * scale;
}

inline int parity_rank(Parity p) {
    switch (p) {
        case Parity::even: return 0;
        case Parity::odd: return 1;
        case Parity::unclassified: return 2;
        case Parity::none: break;
    }
    return 3;
}

// Ascending order; ties broken by parity label, then by largest-amplitude index.
inline void canonicalize(EigenDecomposition& d) {
    const Eigen::Index n = d.size();
    if (d.parity.size() != static_cast<std::size_t>(n)) {
        d.parity.assign(static_cast<std::size_t>(n), Parity::none);
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::Index k = dominant_index(d.vectors.col(j));
        const Complex c = d.vectors(k, j);
        if (std::abs(c) > 0.0) {
            d.vectors.col(j) *= std::conj(c) / std::abs(c);
        }
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    const double tol = tie_tolerance(d.values);
    std::vector<Eigen::Index> dom(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) {
        dom[static_cast<std::size_t>(j)] = dominant_index(d.vectors.col(j));
    }
    Eigen::Index start = 0;
    while (start < n) {
        Eigen::Index end = start + 1;
        while (end < n && d.values(end) - d.values(end - 1) <= tol) {
            ++end;
        }
        std::stable_sort(order.begin() + start, order.begin() + end, [&](Eigen::Index a, Eigen::Index b) {
            const int pa = parity_rank(d.parity[static_cast<std::size_t>(a)]);
            const int pb = parity_rank(d.parity[static_cast<std::size_t>(b)]);
            if (pa != pb) {
                return pa < pb;
            }
            return dom[static_cast<std::size_t>(a)] < dom[static_cast<std::size_t>(b)];
        });
        start = end;
    }
    EigenDecomposition out;
    out.values.resize(n);
    out.vectors.resize(d.vectors.rows(), n);
    out.parity.resize(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::Index src = order[static_cast<std::size_t>(j)];
        out.values(j) = d.values(src);
        out.vectors.col(j) = d.vectors.col(src);
        out.parity[static_cast<std::size_t>(j)] = d.parity[static_cast<std::size_t>(src)];
    }
    d = std::move(out);
}

}  // namespace detail

// Full Hermitian eigendecomposition with deterministic ordering and phases.
inline EigenDecomposition eigh(const Matrix& op) {
    if (op.rows() != op.cols()) {
        throw std::invalid_argument("eigh: operator must be square");
    }
    if (op.rows() == 0) {
        throw std::invalid_argument("eigh: operator must be non-empty");
    }
    if (!is_hermitian(op, 1e-10)) {
        throw std::invalid_argument("eigh: operator is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(op));
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eigh: eigensolver did not converge");
    }
    EigenDecomposition d;
    d.values = solver.eigenvalues();
    d.vectors = solver.eigenvectors();
    d.parity.assign(static_cast<std::size_t>(d.values.size()), Parity::none);
    detail::canonicalize(d);
    return d;
}

// Decomposition of an operator that is already diagonal in the working basis.
// Values stay in slot order and the vectors are the identity, so index sets
// built on it refer to basis slots directly.
inline EigenDecomposition diagonal_decomposition(const Matrix& op, double tol = 1e-10) {
    if (op.rows() != op.cols()) {
        throw std::invalid_argument("diagonal_decomposition: operator must be square");
    }
    const double scale = std::max(1.0, op.cwiseAbs().maxCoeff());
    Matrix off = op;
    off.diagonal().setZero();
    if (off.size() > 0 && off.cwiseAbs().maxCoeff() > tol * scale) {
        throw std::invalid_argument("diagonal_decomposition: operator is not diagonal");
    }
    EigenDecomposition d;
    d.values = op.diagonal().real();
    d.vectors = Matrix::Identity(op.rows(), op.cols());
    d.parity.assign(static_cast<std::size_t>(op.rows()), Parity::none);
    return d;
}

// Label each level by the eigenvalue of P. Near-degenerate runs are first
// re-mixed into the parity eigenbasis by diagonalizing P restricted to them.
inline EigenDecomposition classify_parity(EigenDecomposition d, const Matrix& parity_op) {
    const Eigen::Index n = d.size();
    if (parity_op.rows() != d.vectors.rows() || parity_op.cols() != d.vectors.rows()) {
        throw std::invalid_argument("classify_parity: dimension mismatch");
    }
    const double tol = std::max(1e-9, detail::tie_tolerance(d.values));
    Eigen::Index start = 0;
    while (start < n) {
        Eigen::Index end = start + 1;
        while (end < n && d.values(end) - d.values(end - 1) <= tol) {
            ++end;
        }
        if (end - start > 1) {
            const Matrix block = d.vectors.middleCols(start, end - start);
            const Matrix restricted = block.adjoint() * parity_op * block;
            Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(restricted));
            d.vectors.middleCols(start, end - start) = block * es.eigenvectors();
        }
        start = end;
    }
    d.parity.resize(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) {
        const double p = (d.vectors.col(j).adjoint() * parity_op * d.vectors.col(j))(0, 0).real();
        d.parity[static_cast<std::size_t>(j)] = std::abs(p) >= 0.99 ? parity_from_sign(p) : Parity::unclassified;
    }
    detail::canonicalize(d);
    return d;
}

inline EigenDecomposition exact_spectrum(const ModelParams& params, const TruncationConfig& trunc) {
    return classify_parity(eigh(build_rabi(params, trunc)), build_parity(trunc));
}

struct SpectrumRow {
    double g{0.0};
    std::string method;
    int level{0};
    Branch branch{Branch::unassigned};
    Parity parity{Parity::none};
    double energy{0.0};
    bool spurious{false};

    bool operator==(const SpectrumRow&) const = default;
};

struct SpectrumTable {
    std::vector<SpectrumRow> rows;

    bool operator==(const SpectrumTable&) const = default;
};

struct ExactSweepOptions {
    bool track_continuity{false};  // link levels at adjacent points by eigenvector overlap
};

struct ExactSweep {
    SpectrumTable table;
    std::vector<double> failed;  // grid points whose decomposition failed
    // links[i][k]: level at point i-1 with maximal overlap with level k at point i
    // (empty unless continuity tracking was requested; links[0] is empty).
    std::vector<std::vector<int>> links;
};

inline ExactSweep sweep_exact(const ModelParams& base, const std::vector<double>& g_grid,
                              const TruncationConfig& trunc, int n_levels,
                              const ExactSweepOptions& options = {}) {
    trunc.validate();
    if (g_grid.empty()) {
        throw std::invalid_argument("sweep_exact: empty g grid");
    }
    for (std::size_t i = 1; i < g_grid.size(); ++i) {
        if (!(g_grid[i] > g_grid[i - 1])) {
            throw std::invalid_argument("sweep_exact: g grid must be strictly increasing");
        }
    }
    if (n_levels < 1 || n_levels > trunc.dim() - 2 * trunc.guard) {
        throw std::invalid_argument("sweep_exact: n_levels must lie in [1, 2(n_max+1) - 2 guard]");
    }
    ExactSweep out;
    const Matrix parity = build_parity(trunc);
    Matrix previous;
    bool have_previous = false;
    for (const double g : g_grid) {
        EigenDecomposition d;
        try {
            d = classify_parity(eigh(build_rabi(base.with_g(g), trunc)), parity);
        } catch (const std::exception&) {
            out.failed.push_back(g);
            if (options.track_continuity) {
                out.links.emplace_back();
            }
            have_previous = false;
            continue;
        }
        for (int k = 0; k < n_levels; ++k) {
            SpectrumRow row;
            row.g = g;
            row.method = "exact";
            row.level = k;
            row.parity = d.parity[static_cast<std::size_t>(k)];
            row.energy = d.values(k);
            out.table.rows.push_back(row);
        }
        if (options.track_continuity) {
            std::vector<int> link;
            if (have_previous) {
                const Matrix overlap = (previous.adjoint() * d.vectors.leftCols(n_levels)).cwiseAbs2();
                for (int k = 0; k < n_levels; ++k) {
                    Eigen::Index best = 0;
                    overlap.col(k).real().maxCoeff(&best);
                    link.push_back(static_cast<int>(best));
                }
            }
            out.links.push_back(std::move(link));
            previous = d.vectors.leftCols(n_levels);
            have_previous = true;
        }
    }
    return out;
}

// Number of lowest levels whose energies agree between n_max and 2 n_max to
// 1e-8 omega. The top photon pair is never claimed.
inline int validate_truncation(const ModelParams& params, const TruncationConfig& trunc) {
    params.validate();
    trunc.validate();
    const RealVector coarse = eigh(build_rabi(params, trunc)).values;
    const RealVector fine = eigh(build_rabi(params, trunc.doubled())).values;
    const double tol = 1e-8 * params.omega;
    const int cap = trunc.dim() - 2;
    int count = 0;
    while (count < cap && std::abs(coarse(count) - fine(count)) <= tol) {
        ++count;
    }
    return count;
}

struct ParitySpectrum {
    RealVector even;  // ascending
    RealVector odd;   // ascending
};

// Exact eigenvalues of H split by parity, from the two parity blocks.
inline ParitySpectrum parity_resolved_spectrum(const ModelParams& params, const TruncationConfig& trunc) {
    const Matrix h = build_rabi(params, trunc);
    const Matrix p = build_parity(trunc);
    std::vector<Eigen::Index> even;
    std::vector<Eigen::Index> odd;
    for (Eigen::Index k = 0; k < h.rows(); ++k) {
        (p(k, k).real() > 0.0 ? even : odd).push_back(k);
    }
    auto block_values = [&](const std::vector<Eigen::Index>& idx) {
        const auto n = static_cast<Eigen::Index>(idx.size());
        Matrix b(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                b(i, j) = h(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
            }
        }
        Eigen::SelfAdjointEigenSolver<Matrix> es(b, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) {
            throw std::runtime_error("parity_resolved_spectrum: eigensolver did not converge");
        }
        return RealVector(es.eigenvalues());
    };
    return {block_values(even), block_values(odd)};
}

}  // namespace resonancekit
