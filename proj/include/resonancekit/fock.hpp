// fock.hpp: Truncated Fock-space operators for a two-level atom in one field mode
//
// Basis convention: index k = 2n + s, n the photon number and s = 0 for the
// upper atomic state "+" and s = 1 for the lower state "-". Photon blocks are
// therefore contiguous 2x2 atomic blocks.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace resonancekit {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

enum class Atom : int { plus = 0, minus = 1 };

inline constexpr int atom_index(Atom a) noexcept { return static_cast<int>(a); }

inline std::string to_string(Atom a) { return a == Atom::plus ? "+" : "-"; }

// Physical parameters in units with hbar = 1.
struct ModelParams {
    double omega{1.0};   // field-mode frequency
    double omega0{1.0};  // atomic splitting
    double g{0.0};       // dipole coupling

    void validate() const {
        if (!(omega > 0.0) || !std::isfinite(omega)) {
            throw std::invalid_argument("ModelParams: omega must be > 0");
        }
        if (!(omega0 >= 0.0) || !std::isfinite(omega0)) {
            throw std::invalid_argument("ModelParams: omega0 must be >= 0");
        }
        if (!(g >= 0.0) || !std::isfinite(g)) {
            throw std::invalid_argument("ModelParams: g must be >= 0");
        }
    }

    ModelParams with_g(double coupling) const {
        ModelParams p = *this;
        p.g = coupling;
        return p;
    }
};

// Numerical controls for the truncated field.
struct TruncationConfig {
    int n_max{60};  // highest photon number retained
    int guard{0};   // top photon levels excluded from validity claims

    void validate() const {
        if (n_max < 1) {
            throw std::invalid_argument("TruncationConfig: n_max must be >= 1");
        }
        if (guard < 0 || guard >= n_max) {
            throw std::invalid_argument("TruncationConfig: guard must satisfy 0 <= guard < n_max");
        }
    }

    int field_dim() const noexcept { return n_max + 1; }
    int dim() const noexcept { return 2 * (n_max + 1); }

    TruncationConfig doubled() const { return TruncationConfig{2 * n_max, guard}; }
};

// Guard band ceil(8 g^2 / omega^2) + 10: the strong-coupling displacement moves
// photon occupation by O((2g/omega)^2).
inline int default_guard(const ModelParams& p) {
    const double r = p.g / p.omega;
    return static_cast<int>(std::ceil(8.0 * r * r - 1e-12)) + 10;
}

// Truncation with the default guard band, clamped below n_max.
inline TruncationConfig make_truncation(int n_max, const ModelParams& p) {
    TruncationConfig t{n_max, 0};
    if (n_max < 1) {
        throw std::invalid_argument("TruncationConfig: n_max must be >= 1");
    }
    t.guard = std::min(default_guard(p), n_max - 1);
    return t;
}

inline constexpr int basis_index(int n, Atom a) noexcept { return 2 * n + atom_index(a); }

inline constexpr int photon_of(int k) noexcept { return k / 2; }

inline constexpr Atom atom_of(int k) noexcept { return (k % 2 == 0) ? Atom::plus : Atom::minus; }

struct BosonOps {
    Matrix a;       // annihilation
    Matrix a_dag;   // creation
    Matrix number;  // a_dag a
};

// a = sum_n sqrt(n+1) |n><n+1|, truncated at n_max.
inline BosonOps build_boson_ops(const TruncationConfig& trunc) {
    if (trunc.n_max < 1) {
        throw std::invalid_argument("build_boson_ops: n_max must be >= 1");
    }
    const int d = trunc.field_dim();
    BosonOps ops;
    ops.a = Matrix::Zero(d, d);
    ops.number = Matrix::Zero(d, d);
    for (int n = 0; n < trunc.n_max; ++n) {
        ops.a(n, n + 1) = std::sqrt(static_cast<double>(n + 1));
    }
    for (int n = 0; n < d; ++n) {
        ops.number(n, n) = static_cast<double>(n);
    }
    ops.a_dag = ops.a.adjoint();
    return ops;
}

namespace pauli {

inline Matrix identity() { return Matrix::Identity(2, 2); }

inline Matrix x() {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
    return m;
}

inline Matrix y() {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = Complex(0.0, -1.0);
    m(1, 0) = Complex(0.0, 1.0);
    return m;
}

inline Matrix z() {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return m;
}

}  // namespace pauli

// Kronecker product field (x) atom in the k = 2n + s ordering.
inline Matrix tensor(const Matrix& field_op, const Matrix& atom_op) {
    if (field_op.rows() != field_op.cols()) {
        throw std::invalid_argument("tensor: field operator must be square");
    }
    if (atom_op.rows() != 2 || atom_op.cols() != 2) {
        throw std::invalid_argument("tensor: atom operator must be 2x2");
    }
    const Eigen::Index d = field_op.rows();
    Matrix out = Matrix::Zero(2 * d, 2 * d);
    for (Eigen::Index n = 0; n < d; ++n) {
        for (Eigen::Index m = 0; m < d; ++m) {
            const Complex f = field_op(n, m);
            if (f == Complex(0.0)) {
                continue;
            }
            out.block(2 * n, 2 * m, 2, 2) = f * atom_op;
        }
    }
    return out;
}

// Checked variant: the field factor must match the truncation.
inline Matrix tensor(const Matrix& field_op, const Matrix& atom_op, const TruncationConfig& trunc) {
    if (field_op.rows() != trunc.field_dim() || field_op.cols() != trunc.field_dim()) {
        throw std::invalid_argument("tensor: field operator dimension does not match n_max + 1");
    }
    return tensor(field_op, atom_op);
}

// H = omega (N + 1/2) (x) 1 + (omega0 / 2) 1 (x) sigma_z + g (a + a_dag) (x) sigma_x
inline Matrix build_rabi(const ModelParams& params, const TruncationConfig& trunc) {
    params.validate();
    trunc.validate();
    const BosonOps b = build_boson_ops(trunc);
    const Matrix id = Matrix::Identity(trunc.field_dim(), trunc.field_dim());
    Matrix h = params.omega * tensor(b.number + 0.5 * id, pauli::identity());
    h += 0.5 * params.omega0 * tensor(id, pauli::z());
    h += params.g * tensor(b.a + b.a_dag, pauli::x());
    return h;
}

// P = (-1)^N (x) sigma_z, diagonal with exact +-1 entries.
inline Matrix build_parity(const TruncationConfig& trunc) {
    trunc.validate();
    Matrix p = Matrix::Zero(trunc.dim(), trunc.dim());
    for (int n = 0; n <= trunc.n_max; ++n) {
        const double photon_sign = (n % 2 == 0) ? 1.0 : -1.0;
        p(basis_index(n, Atom::plus), basis_index(n, Atom::plus)) = photon_sign;
        p(basis_index(n, Atom::minus), basis_index(n, Atom::minus)) = -photon_sign;
    }
    return p;
}

inline Vector basis_vector(int dim, int k) {
    Vector v = Vector::Zero(dim);
    v(k) = 1.0;
    return v;
}

inline bool is_hermitian(const Matrix& m, double rel_tol = 1e-12) {
    if (m.rows() != m.cols()) {
        return false;
    }
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

inline bool is_anti_hermitian(const Matrix& m, double rel_tol = 1e-10) {
    if (m.rows() != m.cols()) {
        return false;
    }
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return (m + m.adjoint()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

inline Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

// Operator 2-norm of a Hermitian matrix.
inline double hermitian_norm(const Matrix& m) {
    if (m.size() == 0) {
        return 0.0;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Operator 2-norm of an arbitrary matrix.
inline double operator_norm(const Matrix& m) {
    if (m.size() == 0) {
        return 0.0;
    }
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

}  // namespace resonancekit
