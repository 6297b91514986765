// Independent reference routines used only by the tests.

#pragma once

#include "resonancekit/fock.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace oracle {

using resonancekit::Complex;
using resonancekit::Matrix;

// exp(A) by scaling and squaring with a degree-18 Taylor polynomial.
inline Matrix expm(const Matrix& a) {
    const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    int s = 0;
    if (norm > 0.5) {
        s = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    }
    const Matrix b = a / std::ldexp(1.0, s);
    Matrix term = Matrix::Identity(a.rows(), a.cols());
    Matrix sum = term;
    for (int k = 1; k <= 18; ++k) {
        term = term * b / static_cast<double>(k);
        sum += term;
    }
    for (int i = 0; i < s; ++i) {
        sum = sum * sum;
    }
    return sum;
}

inline Matrix random_hermitian(int n, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> d(0.0, 1.0);
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            m(i, j) = Complex(d(rng), d(rng));
        }
    }
    return scale * 0.5 * (m + m.adjoint());
}

inline Matrix random_anti_hermitian(int n, std::mt19937_64& rng, double scale = 1.0) {
    return Complex(0.0, 1.0) * random_hermitian(n, rng, scale);
}

inline Matrix random_unitary(int n, std::mt19937_64& rng) {
    return expm(random_anti_hermitian(n, rng));
}

// Diagonal H0 whose spectrum has exact degeneracies of random multiplicity.
inline Matrix seeded_degenerate_diagonal(int n, std::mt19937_64& rng, std::vector<double>* levels = nullptr) {
    std::uniform_int_distribution<int> mult(1, 3);
    Matrix h = Matrix::Zero(n, n);
    int k = 0;
    double e = 0.0;
    while (k < n) {
        const int m = std::min(mult(rng), n - k);
        for (int i = 0; i < m; ++i, ++k) {
            h(k, k) = e;
            if (levels) {
                levels->push_back(e);
            }
        }
        e += 0.5 + std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    }
    return h;
}

}  // namespace oracle
