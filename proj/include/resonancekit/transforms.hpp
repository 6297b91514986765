// transforms.hpp: Resonant transformations: photon-shift isometries, atomic
// rotations, the one- and two-photon chains, the strong-coupling chain with
// its zero-field shift, a generic block-diagonalizing transformation, and
// removal of the spurious zero levels the isometries introduce.

#pragma once

#include "resonancekit/averaging.hpp"
#include "resonancekit/closed_form.hpp"
#include "resonancekit/fock.hpp"
#include "resonancekit/kam.hpp"
#include "resonancekit/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace resonancekit {

inline std::string slot_label(int k) {
    return "|" + std::to_string(photon_of(k)) + "," + to_string(atom_of(k)) + ">";
}

// Matrix convention: rows index the old basis, columns the new one, so an
// operator transforms as M^dag H M.
struct IsometryRecord {
    std::string name;
    Matrix matrix;
    std::vector<int> kernel;  // new-basis slots whose column is zero
    int photon_dressing{0};
    int loss_band{0};         // top photon rows no longer represented
};

struct TransformedHamiltonian {
    Matrix op;
    Matrix reference;  // diagonal part used as the next unperturbed operator
    Matrix parity;     // parity conjugated through the same chain
    std::vector<int> kernel;
    std::vector<std::string> provenance;
    int loss_band{0};

    Matrix perturbation() const { return op - reference; }

    std::vector<std::string> kernel_labels() const {
        std::vector<std::string> out;
        for (const int k : kernel) {
            out.push_back(slot_label(k));
        }
        return out;
    }

    bool is_kernel(int k) const { return std::find(kernel.begin(), kernel.end(), k) != kernel.end(); }
};

namespace isometry {

inline Matrix rotation_block() {
    const double h = 1.0 / std::sqrt(2.0);
    Matrix t(2, 2);
    t << h, -h, h, h;
    return t;
}

// Upper atomic state dressed by -1 photon: new (m,+) <- old (m-1,+).
inline IsometryRecord one_photon(const TruncationConfig& trunc) {
    trunc.validate();
    IsometryRecord r{"R1", Matrix::Zero(trunc.dim(), trunc.dim()), {basis_index(0, Atom::plus)}, -1, 1};
    for (int n = 0; n < trunc.n_max; ++n) {
        r.matrix(basis_index(n, Atom::plus), basis_index(n + 1, Atom::plus)) = 1.0;
    }
    for (int n = 0; n <= trunc.n_max; ++n) {
        r.matrix(basis_index(n, Atom::minus), basis_index(n, Atom::minus)) = 1.0;
    }
    return r;
}

// Lower atomic state dressed by -1 photon: new (m,-) <- old (m-1,-).
inline IsometryRecord zero_field(const TruncationConfig& trunc) {
    trunc.validate();
    IsometryRecord r{"R1'", Matrix::Zero(trunc.dim(), trunc.dim()), {basis_index(0, Atom::minus)}, -1, 1};
    for (int n = 0; n <= trunc.n_max; ++n) {
        r.matrix(basis_index(n, Atom::plus), basis_index(n, Atom::plus)) = 1.0;
    }
    for (int n = 0; n < trunc.n_max; ++n) {
        r.matrix(basis_index(n, Atom::minus), basis_index(n + 1, Atom::minus)) = 1.0;
    }
    return r;
}

// T = exp(-i pi/4 sigma_y) on every photon block.
inline IsometryRecord rotation(const TruncationConfig& trunc) {
    trunc.validate();
    return {"T", tensor(Matrix::Identity(trunc.field_dim(), trunc.field_dim()), rotation_block()), {}, 0, 0};
}

// T1 = P0 (x) 1 + P_perp0 (x) T
inline IsometryRecord rotation_above_vacuum(const TruncationConfig& trunc) {
    trunc.validate();
    IsometryRecord r{"T1", Matrix::Identity(trunc.dim(), trunc.dim()), {}, 0, 0};
    const Matrix t = rotation_block();
    for (int n = 1; n <= trunc.n_max; ++n) {
        r.matrix.block(2 * n, 2 * n, 2, 2) = t;
    }
    return r;
}

// A = sum_n sqrt(n+1) |n><n+2| on the field factor.
inline Matrix a_two(const TruncationConfig& trunc) {
    trunc.validate();
    Matrix a = Matrix::Zero(trunc.field_dim(), trunc.field_dim());
    for (int n = 0; n + 2 <= trunc.n_max; ++n) {
        a(n, n + 2) = std::sqrt(n + 1.0);
    }
    return a;
}

// A restricted to n >= 1 on both sides.
inline Matrix a_two_perp0(const TruncationConfig& trunc) {
    Matrix a = a_two(trunc);
    a.row(0).setZero();
    a.col(0).setZero();
    return a;
}

// Upper state dressed by -2 photons on n >= 1, identity on the lower state
// except |0,-> and |2,->.
inline IsometryRecord two_photon_perp(const TruncationConfig& trunc) {
    trunc.validate();
    if (trunc.n_max < 3) {
        throw std::invalid_argument("two_photon_perp: n_max must be >= 3");
    }
    IsometryRecord r{"R2perp",
                     Matrix::Zero(trunc.dim(), trunc.dim()),
                     {basis_index(1, Atom::plus), basis_index(2, Atom::plus)},
                     -2,
                     2};
    for (int n = 1; n + 2 <= trunc.n_max; ++n) {
        r.matrix(basis_index(n, Atom::plus), basis_index(n + 2, Atom::plus)) = 1.0;
    }
    for (int n = 1; n <= trunc.n_max; ++n) {
        if (n != 2) {
            r.matrix(basis_index(n, Atom::minus), basis_index(n, Atom::minus)) = 1.0;
        }
    }
    return r;
}

// cos t (|2><2| - |0><0|) - sin t (|2><0| + |0><2|) on the lower state.
inline IsometryRecord two_photon_corner(double theta, const TruncationConfig& trunc) {
    trunc.validate();
    if (trunc.n_max < 2) {
        throw std::invalid_argument("two_photon_corner: n_max must be >= 2");
    }
    IsometryRecord r{"R02", Matrix::Zero(trunc.dim(), trunc.dim()), {}, 0, 0};
    const int i0 = basis_index(0, Atom::minus);
    const int i2 = basis_index(2, Atom::minus);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    r.matrix(i2, i2) = c;
    r.matrix(i0, i0) = -c;
    r.matrix(i2, i0) = -s;
    r.matrix(i0, i2) = -s;
    return r;
}

// R2 = R2perp + R02 + P_(0,+)
inline IsometryRecord two_photon(double theta, const TruncationConfig& trunc) {
    IsometryRecord r = two_photon_perp(trunc);
    r.name = "R2";
    r.matrix += two_photon_corner(theta, trunc).matrix;
    r.matrix(basis_index(0, Atom::plus), basis_index(0, Atom::plus)) = 1.0;
    return r;
}

// exp(-(g/omega)(a_dag - a) (x) sigma_z), exponentiated exactly at truncation.
inline IsometryRecord displacement(const ModelParams& p, const TruncationConfig& trunc) {
    const BosonOps b = build_boson_ops(trunc);
    const Matrix gen = -(p.g / p.omega) * tensor(b.a_dag - b.a, pauli::z());
    return {"U", unitary_exp(gen), {}, 0, 0};
}

}  // namespace isometry

inline Matrix diagonal_part(const Matrix& m) {
    Matrix d = Matrix::Zero(m.rows(), m.cols());
    d.diagonal() = m.diagonal();
    return d;
}

inline TransformedHamiltonian untransformed(const Matrix& h, const TruncationConfig& trunc) {
    if (h.rows() != trunc.dim() || h.cols() != trunc.dim()) {
        throw std::invalid_argument("untransformed: operator dimension does not match truncation");
    }
    return {h, diagonal_part(h), build_parity(trunc), {}, {}, 0};
}

// Conjugates op and parity; kernels already present follow the isometry.
// The reference is conjugated too and should be reset by the caller when the
// transformation does not keep it diagonal.
inline TransformedHamiltonian apply_isometry(const TransformedHamiltonian& th, const IsometryRecord& r) {
    const Matrix& m = r.matrix;
    if (m.rows() != th.op.rows()) {
        throw std::invalid_argument("apply_isometry: dimension mismatch");
    }
    TransformedHamiltonian out;
    out.op = hermitian_part(m.adjoint() * th.op * m);
    out.reference = hermitian_part(m.adjoint() * th.reference * m);
    out.parity = hermitian_part(m.adjoint() * th.parity * m);
    out.kernel = r.kernel;
    for (const int k : th.kernel) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (std::norm(m(k, j)) > 0.5 && !out.is_kernel(static_cast<int>(j))) {
                out.kernel.push_back(static_cast<int>(j));
            }
        }
    }
    std::sort(out.kernel.begin(), out.kernel.end());
    out.provenance = th.provenance;
    out.provenance.push_back(r.name);
    out.loss_band = th.loss_band + r.loss_band;
    return out;
}

// Diagonalizes each photon block (n,+),(n,-) of op, larger eigenvalue to the
// + slot. Blocks that contain a kernel slot are left untouched.
inline IsometryRecord photon_block_diagonalizer(const Matrix& op, const std::vector<int>& kernel) {
    const Eigen::Index dim = op.rows();
    IsometryRecord r{"Tblock", Matrix::Identity(dim, dim), {}, 0, 0};
    for (Eigen::Index n = 0; 2 * n + 1 < dim; ++n) {
        const int up = static_cast<int>(2 * n);
        const int down = up + 1;
        if (std::find(kernel.begin(), kernel.end(), up) != kernel.end() ||
            std::find(kernel.begin(), kernel.end(), down) != kernel.end()) {
            continue;
        }
        Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(Matrix(op.block(up, up, 2, 2))));
        Matrix q(2, 2);
        q.col(0) = es.eigenvectors().col(1);
        q.col(1) = es.eigenvectors().col(0);
        for (int c = 0; c < 2; ++c) {
            const Eigen::Index k = detail::dominant_index(q.col(c));
            const Complex v = q(k, c);
            q.col(c) *= std::conj(v) / std::abs(v);
        }
        r.matrix.block(up, up, 2, 2) = q;
    }
    return r;
}

// One-photon resonant transformation R1 T1; the reference is the diagonal
// omega N + g sqrt(N) sigma_z part.
inline TransformedHamiltonian rt_one_photon(const Matrix& h, const TruncationConfig& trunc) {
    TransformedHamiltonian th = untransformed(h, trunc);
    th = apply_isometry(th, isometry::one_photon(trunc));
    th = apply_isometry(th, isometry::rotation_above_vacuum(trunc));
    th.reference = diagonal_part(th.op);
    return th;
}

// Diagonal JC-type references omega N + g_n sqrt(N) sigma_z at every active
// two-photon locus that fits in the truncation.
inline std::vector<Matrix> two_photon_family(double omega, const TruncationConfig& trunc) {
    trunc.validate();
    std::vector<Matrix> out;
    for (int n = 0; n + 2 <= trunc.n_max; ++n) {
        const double gn = 2.0 * omega / (std::sqrt(static_cast<double>(n)) + std::sqrt(n + 2.0));
        Matrix m = Matrix::Zero(trunc.dim(), trunc.dim());
        for (int k = 0; k <= trunc.n_max; ++k) {
            const double root = gn * std::sqrt(static_cast<double>(k));
            m(basis_index(k, Atom::plus), basis_index(k, Atom::plus)) = omega * k + root;
            m(basis_index(k, Atom::minus), basis_index(k, Atom::minus)) = omega * k - root;
        }
        out.push_back(std::move(m));
    }
    return out;
}

using SupportMask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

inline SupportMask two_photon_support(double omega, const TruncationConfig& trunc, double tol_deg = 1e-8) {
    return combined_support(two_photon_family(omega, trunc), tol_deg);
}

// Two-photon resonant transformation on the output of rt_one_photon. The
// effective operator keeps the resonant terms of the whole locus family.
inline TransformedHamiltonian rt_two_photon(const TransformedHamiltonian& h1, const ModelParams& p,
                                            const TruncationConfig& trunc, const SupportMask& support) {
    const Matrix heff = h1.reference + apply_support(h1.perturbation(), support);
    const IsometryRecord r2 = isometry::two_photon(two_photon_angle(p), trunc);
    TransformedHamiltonian th = apply_isometry(h1, r2);
    const Matrix x = hermitian_part(r2.matrix.adjoint() * heff * r2.matrix);
    IsometryRecord t2 = photon_block_diagonalizer(x, th.kernel);
    t2.name = "T2";
    th = apply_isometry(th, t2);
    th.reference = diagonal_part(t2.matrix.adjoint() * x * t2.matrix);
    return th;
}

inline TransformedHamiltonian rt_two_photon(const TransformedHamiltonian& h1, const ModelParams& p,
                                            const TruncationConfig& trunc) {
    return rt_two_photon(h1, p, trunc, two_photon_support(p.omega, trunc));
}

// Block rotation diagonalizing op on each group of slots (ascending
// eigenvalues to ascending slots). Kernel slots are never rotated.
inline TransformedHamiltonian generic_numeric_rt(const TransformedHamiltonian& th,
                                                 const std::vector<std::vector<int>>& groups) {
    const Eigen::Index dim = th.op.rows();
    IsometryRecord u{"Rnum", Matrix::Identity(dim, dim), {}, 0, 0};
    Matrix heff = th.reference;
    for (const auto& raw : groups) {
        std::vector<int> g;
        for (const int k : raw) {
            if (!th.is_kernel(k)) {
                g.push_back(k);
            }
        }
        std::sort(g.begin(), g.end());
        if (g.size() < 2) {
            continue;
        }
        const auto k = static_cast<Eigen::Index>(g.size());
        Matrix block(k, k);
        for (Eigen::Index i = 0; i < k; ++i) {
            for (Eigen::Index j = 0; j < k; ++j) {
                block(i, j) = th.op(g[static_cast<std::size_t>(i)], g[static_cast<std::size_t>(j)]);
                heff(g[static_cast<std::size_t>(i)], g[static_cast<std::size_t>(j)]) = block(i, j);
            }
        }
        Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(block));
        Matrix q = es.eigenvectors();
        for (Eigen::Index c = 0; c < k; ++c) {
            const Eigen::Index d = detail::dominant_index(q.col(c));
            const Complex v = q(d, c);
            q.col(c) *= std::conj(v) / std::abs(v);
        }
        for (Eigen::Index i = 0; i < k; ++i) {
            for (Eigen::Index j = 0; j < k; ++j) {
                u.matrix(g[static_cast<std::size_t>(i)], g[static_cast<std::size_t>(j)]) = q(i, j);
            }
        }
    }
    TransformedHamiltonian out = apply_isometry(th, u);
    out.reference = diagonal_part(u.matrix.adjoint() * heff * u.matrix);
    return out;
}

// Plain-operator form: the reference is diag(H), clusters come from it, and
// every active cluster is rotated into the eigenbasis of H0 + Pi V.
inline TransformedHamiltonian generic_numeric_rt(const Matrix& h, const TruncationConfig& trunc,
                                                 double tol_deg = 1e-8, double tol_active = -1.0) {
    TransformedHamiltonian th = untransformed(h, trunc);
    const Matrix v = th.perturbation();
    const EigenDecomposition decomp = diagonal_decomposition(th.reference);
    DegeneracyClusters clusters = cluster_degeneracies(decomp, tol_deg);
    if (tol_active < 0.0) {
        tol_active = 1e-10 * std::max(hermitian_norm(v), 1e-300);
    }
    const std::vector<ResonanceInfo> info = classify_resonances(v, decomp, clusters, tol_active);
    std::vector<std::vector<int>> groups;
    for (const ResonanceInfo& r : info) {
        if (r.active) {
            groups.push_back(clusters.clusters[static_cast<std::size_t>(r.cluster)]);
        }
    }
    return generic_numeric_rt(th, groups);
}

// Atomic rotation T followed by the displacement U. The reference is the
// analytic (omega (N + 1/2) - g^2/omega) (x) 1.
inline TransformedHamiltonian strong_chain(const Matrix& h, const ModelParams& p, const TruncationConfig& trunc) {
    TransformedHamiltonian th = untransformed(h, trunc);
    th = apply_isometry(th, isometry::rotation(trunc));
    th = apply_isometry(th, isometry::displacement(p, trunc));
    Matrix ref = Matrix::Zero(trunc.dim(), trunc.dim());
    for (int n = 0; n <= trunc.n_max; ++n) {
        const double e = p.omega * (n + 0.5) - p.g * p.g / p.omega;
        ref(basis_index(n, Atom::plus), basis_index(n, Atom::plus)) = e;
        ref(basis_index(n, Atom::minus), basis_index(n, Atom::minus)) = e;
    }
    th.reference = ref;
    return th;
}

inline TransformedHamiltonian atomic_rotation(const TransformedHamiltonian& th, const TruncationConfig& trunc) {
    return apply_isometry(th, isometry::rotation(trunc));
}

inline TransformedHamiltonian resplit(TransformedHamiltonian th, const Matrix& reference) {
    if (reference.rows() != th.op.rows() || reference.cols() != th.op.cols()) {
        throw std::invalid_argument("resplit: dimension mismatch");
    }
    th.reference = reference;
    return th;
}

// reference <- reference + Pi_reference (op - reference)
inline TransformedHamiltonian with_effective_reference(TransformedHamiltonian th, double tol_deg = 1e-8) {
    const EigenDecomposition decomp = diagonal_decomposition(th.reference);
    const DegeneracyClusters clusters = cluster_degeneracies(decomp, tol_deg);
    th.reference = hermitian_part(build_effective(th.reference, th.perturbation(), decomp, clusters));
    return th;
}

// Zero-field resonant transformation: lower atomic state dressed by -1 photon.
inline TransformedHamiltonian rt_zero_field(const TransformedHamiltonian& h2, const TruncationConfig& trunc) {
    TransformedHamiltonian th = apply_isometry(h2, isometry::zero_field(trunc));
    th.reference = diagonal_part(th.op);
    return th;
}

// Full zero-field pipeline on the strong-coupling chain: second atomic
// rotation, photon shift, reference omega N (x) 1, averaging and
// diagonalization of the photon blocks.
inline TransformedHamiltonian strong_rt_chain(const Matrix& h, const ModelParams& p, const TruncationConfig& trunc,
                                              double tol_deg = 1e-8) {
    TransformedHamiltonian th = atomic_rotation(strong_chain(h, p, trunc), trunc);
    th = rt_zero_field(th, trunc);
    Matrix ref = Matrix::Zero(trunc.dim(), trunc.dim());
    for (int n = 0; n <= trunc.n_max; ++n) {
        ref(basis_index(n, Atom::plus), basis_index(n, Atom::plus)) = p.omega * n;
        ref(basis_index(n, Atom::minus), basis_index(n, Atom::minus)) = p.omega * n;
    }
    th = with_effective_reference(resplit(std::move(th), ref), tol_deg);
    const Matrix heff = th.reference;
    IsometryRecord t3 = photon_block_diagonalizer(heff, th.kernel);
    t3.name = "T3";
    th = apply_isometry(th, t3);
    th.reference = diagonal_part(t3.matrix.adjoint() * heff * t3.matrix);
    return th;
}

// Strong-coupling average: reference + Pi V on the chain, then the atomic
// rotation that diagonalizes it.
inline TransformedHamiltonian strong_avg_chain(const Matrix& h, const ModelParams& p, const TruncationConfig& trunc,
                                               double tol_deg = 1e-8) {
    TransformedHamiltonian th = with_effective_reference(strong_chain(h, p, trunc), tol_deg);
    th = atomic_rotation(th, trunc);
    th.reference = diagonal_part(th.reference);
    return th;
}

struct SpuriousFilterResult {
    EigenDecomposition cleaned;
    std::vector<std::string> removed;  // kernel labels, one per removed zero level
};

// Removes one zero level per kernel slot. The zero levels must carry at least
// 0.99 of each kernel vector; inside a degenerate zero group the kept levels
// are the part orthogonal to the kernel vectors.
inline SpuriousFilterResult spurious_filter(const EigenDecomposition& decomp, const std::vector<int>& kernel,
                                            double zero_tol = 1e-9) {
    SpuriousFilterResult out;
    if (kernel.empty()) {
        out.cleaned = decomp;
        return out;
    }
    const Eigen::Index n = decomp.size();
    const double tol = zero_tol * std::max(1.0, decomp.values.cwiseAbs().maxCoeff());
    std::vector<Eigen::Index> zero;
    for (Eigen::Index j = 0; j < n; ++j) {
        if (std::abs(decomp.values(j)) <= tol) {
            zero.push_back(j);
        }
    }
    if (zero.size() < kernel.size()) {
        throw std::runtime_error("spurious_filter: fewer zero levels than kernel vectors");
    }
    Matrix qz(decomp.vectors.rows(), static_cast<Eigen::Index>(zero.size()));
    for (std::size_t c = 0; c < zero.size(); ++c) {
        qz.col(static_cast<Eigen::Index>(c)) = decomp.vectors.col(zero[c]);
    }
    for (const int k : kernel) {
        if (qz.row(k).squaredNorm() < 0.99) {
            throw std::runtime_error("spurious_filter: no zero level matches kernel " + slot_label(k));
        }
        out.removed.push_back(slot_label(k));
    }
    Matrix rest = qz;
    for (const int k : kernel) {
        rest.row(k).setZero();
    }
    const Eigen::Index keep = static_cast<Eigen::Index>(zero.size() - kernel.size());
    Matrix kept_vectors(decomp.vectors.rows(), keep);
    if (keep > 0) {
        Eigen::JacobiSVD<Matrix> svd(rest, Eigen::ComputeThinU);
        kept_vectors = svd.matrixU().leftCols(keep);
    }
    EigenDecomposition& c = out.cleaned;
    c.values.resize(n - static_cast<Eigen::Index>(kernel.size()));
    c.vectors.resize(decomp.vectors.rows(), c.values.size());
    c.parity.clear();
    Eigen::Index w = 0;
    Eigen::Index used_zero = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        const bool is_zero = std::find(zero.begin(), zero.end(), j) != zero.end();
        if (is_zero) {
            if (used_zero < keep) {
                c.values(w) = decomp.values(j);
                c.vectors.col(w) = kept_vectors.col(used_zero);
                c.parity.push_back(Parity::none);
                ++w;
            }
            ++used_zero;
            continue;
        }
        c.values(w) = decomp.values(j);
        c.vectors.col(w) = decomp.vectors.col(j);
        c.parity.push_back(decomp.parity.empty() ? Parity::none : decomp.parity[static_cast<std::size_t>(j)]);
        ++w;
    }
    return out;
}

}  // namespace resonancekit
