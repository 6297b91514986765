#include "resonancekit/closed_form.hpp"
#include "resonancekit/transforms.hpp"

#include "oracle.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace rk = resonancekit;
using rk::Atom;
using rk::basis_index;
using rk::Branch;
using rk::Complex;
using rk::Matrix;
using rk::ModelParams;
using rk::TruncationConfig;

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// Rows and columns of photon blocks above n_max - band are excluded.
double max_abs_outside_band(const Matrix& m, int n_max, int band, int block = 2) {
    const int keep = block * (n_max + 1 - band);
    return max_abs(m.topLeftCorner(keep, keep));
}

Matrix projector(int dim, std::initializer_list<int> slots) {
    Matrix p = Matrix::Zero(dim, dim);
    for (const int k : slots) {
        p(k, k) = 1.0;
    }
    return p;
}

std::vector<double> non_spurious(const std::vector<rk::ClosedFormLevel>& levels) {
    std::vector<double> out;
    for (const auto& l : levels) {
        if (!l.spurious) {
            out.push_back(l.energy);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

Matrix jaynes_cummings(const ModelParams& p, const TruncationConfig& t) {
    const auto b = rk::build_boson_ops(t);
    Matrix sp = Matrix::Zero(2, 2);
    sp(0, 1) = 1.0;
    const Matrix id = Matrix::Identity(t.field_dim(), t.field_dim());
    return p.omega * rk::tensor(b.number + 0.5 * id, rk::pauli::identity()) + 0.5 * p.omega0 * rk::tensor(id, rk::pauli::z()) +
           p.g * (rk::tensor(b.a, sp) + rk::tensor(b.a_dag, sp.adjoint()));
}

int zero_count(const Matrix& op, double tol = 1e-9) {
    const auto v = rk::eigh(op).values;
    return static_cast<int>((v.array().abs() <= tol).count());
}

}  // namespace

TEST(Isometry, OnePhotonIdentities) {
    const TruncationConfig t{12, 0};
    const auto r = rk::isometry::one_photon(t);
    const Matrix& m = r.matrix;
    const int d = t.dim();
    EXPECT_EQ(max_abs(m.adjoint() * m - (Matrix::Identity(d, d) - projector(d, {basis_index(0, Atom::plus)}))), 0.0);
    EXPECT_EQ(max_abs_outside_band(m * m.adjoint() - Matrix::Identity(d, d), t.n_max, r.loss_band), 0.0);
    EXPECT_EQ(r.kernel, std::vector<int>({basis_index(0, Atom::plus)}));
    EXPECT_EQ(r.photon_dressing, -1);
}

TEST(Isometry, ZeroFieldIdentities) {
    const TruncationConfig t{12, 0};
    const auto r = rk::isometry::zero_field(t);
    const Matrix& m = r.matrix;
    const int d = t.dim();
    EXPECT_EQ(max_abs(m.adjoint() * m - (Matrix::Identity(d, d) - projector(d, {basis_index(0, Atom::minus)}))), 0.0);
    EXPECT_EQ(max_abs_outside_band(m * m.adjoint() - Matrix::Identity(d, d), t.n_max, r.loss_band), 0.0);
    EXPECT_EQ(r.kernel, std::vector<int>({basis_index(0, Atom::minus)}));
}

TEST(Isometry, TwoPhotonOperatorIdentities) {
    const TruncationConfig t{14, 0};
    const Matrix a2 = rk::isometry::a_two(t);
    const auto b = rk::build_boson_ops(t);
    const int f = t.field_dim();
    EXPECT_EQ(max_abs_outside_band(a2 * a2.adjoint() - b.a * b.a_dag, t.n_max, 2, 1), 0.0);
    Matrix rhs = b.a_dag * b.a - Matrix::Identity(f, f);
    rhs(0, 0) += 1.0;
    // sqrt(n+1)^2 against n+1: rounding only
    EXPECT_LE(max_abs(a2.adjoint() * a2 - rhs), 4 * kEps * t.n_max);
}

TEST(Isometry, TwoPhotonPairIdentities) {
    const TruncationConfig t{14, 0};
    const int d = t.dim();
    const auto perp = rk::isometry::two_photon_perp(t);
    const Matrix& m = perp.matrix;
    const Matrix retained = Matrix::Identity(d, d) -
                            projector(d, {basis_index(0, Atom::plus), basis_index(1, Atom::plus), basis_index(2, Atom::plus),
                                          basis_index(0, Atom::minus), basis_index(2, Atom::minus)});
    EXPECT_EQ(max_abs(m.adjoint() * m - retained), 0.0);
    const auto full = rk::isometry::two_photon(0.3, t);
    const Matrix kernel = projector(d, {basis_index(1, Atom::plus), basis_index(2, Atom::plus)});
    EXPECT_LT(max_abs(full.matrix.adjoint() * full.matrix - (Matrix::Identity(d, d) - kernel)), 1e-15);
    EXPECT_LT(max_abs_outside_band(full.matrix * full.matrix.adjoint() - Matrix::Identity(d, d), t.n_max, full.loss_band),
              1e-15);
    EXPECT_EQ(full.kernel.size(), 2u);
}

TEST(Isometry, RotationIsUnitary) {
    const TruncationConfig t{6, 0};
    const int d = t.dim();
    for (const auto& r : {rk::isometry::rotation(t), rk::isometry::rotation_above_vacuum(t)}) {
        EXPECT_LT(max_abs(r.matrix.adjoint() * r.matrix - Matrix::Identity(d, d)), 1e-15);
    }
}

TEST(Isometry, DisplacementMatchesOracleAndReducesAtZeroField) {
    const TruncationConfig t{20, 0};
    const ModelParams p{1, 1, 0.6};
    const auto b = rk::build_boson_ops(t);
    const Matrix gen = -(p.g / p.omega) * rk::tensor(b.a_dag - b.a, rk::pauli::z());
    const Matrix u = rk::isometry::displacement(p, t).matrix;
    EXPECT_LT(max_abs(u - oracle::expm(gen)), 1e-11);
    EXPECT_LT(max_abs(u.adjoint() * u - Matrix::Identity(t.dim(), t.dim())), 1e-12);
    EXPECT_LT(max_abs(rk::isometry::displacement(p.with_g(0.0), t).matrix - Matrix::Identity(t.dim(), t.dim())), 1e-15);
}

TEST(RtOnePhoton, JaynesCummingsBecomesDiagonal) {
    const ModelParams p{1, 1, 0.3};
    const TruncationConfig t{30, 0};
    const auto th = rk::rt_one_photon(jaynes_cummings(p, t), t);
    const int keep = 2 * (t.n_max + 1 - th.loss_band);
    Matrix off = th.op.topLeftCorner(keep, keep);
    off.diagonal().setZero();
    EXPECT_LT(max_abs(off), 1e-14);
    for (int n = 1; n < t.n_max - 1; ++n) {
        EXPECT_NEAR(th.op(basis_index(n, Atom::plus), basis_index(n, Atom::plus)).real(), n + p.g * std::sqrt(n), 1e-13);
        EXPECT_NEAR(th.op(basis_index(n, Atom::minus), basis_index(n, Atom::minus)).real(), n - p.g * std::sqrt(n), 1e-13);
    }
    EXPECT_EQ(th.op(0, 0), Complex(0.0));
    EXPECT_EQ(th.kernel_labels(), std::vector<std::string>({"|0,+>"}));
}

TEST(RtOnePhoton, SpectrumPreservedModuloSpuriousZero) {
    const TruncationConfig t{60, 0};
    for (const double g : {0.0, 0.1, 0.7}) {
        const Matrix h = rk::build_rabi(ModelParams{1, 1, g}, t);
        const auto th = rk::rt_one_photon(h, t);
        const auto cleaned = rk::spurious_filter(rk::eigh(th.op), th.kernel);
        EXPECT_EQ(cleaned.removed, std::vector<std::string>({"|0,+>"}));
        const auto exact = rk::eigh(h).values;
        for (int k = 0; k < 40; ++k) {
            EXPECT_NEAR(cleaned.cleaned.values(k), exact(k), 1e-9) << "g=" << g << " level " << k;
        }
    }
}

TEST(RtOnePhoton, ReferenceIsJcClosedForm) {
    const ModelParams p{1, 1, 0.45};
    const TruncationConfig t{25, 0};
    const auto th = rk::rt_one_photon(rk::build_rabi(p, t), t);
    for (const auto& l : rk::jc_spectrum(p, t.n_max - 1)) {
        const int k = basis_index(l.n, l.branch == Branch::plus ? Atom::plus : Atom::minus);
        EXPECT_NEAR(th.reference(k, k).real(), l.energy, 1e-14) << l.n;
    }
}

TEST(RtTwoPhoton, MatchesClosedFormOnValidatedLevels) {
    const TruncationConfig t{80, 0};
    for (const double g : {0.0, 0.1, 0.4, 1.0}) {
        const ModelParams p{1, 1, g};
        const auto h1 = rk::rt_one_photon(rk::build_rabi(p, t), t);
        const auto h2 = rk::rt_two_photon(h1, p, t);
        EXPECT_EQ(h2.kernel.size(), 3u);
        std::vector<double> matrix_path;
        for (int k = 0; k < t.dim(); ++k) {
            if (!h2.is_kernel(k) && rk::photon_of(k) <= t.n_max - h2.loss_band) {
                matrix_path.push_back(h2.reference(k, k).real());
            }
        }
        std::sort(matrix_path.begin(), matrix_path.end());
        const auto closed = non_spurious(rk::rt2_spectrum(p, t.n_max));
        for (std::size_t k = 0; k < 60; ++k) {
            EXPECT_NEAR(matrix_path[k], closed[k], 1e-9) << "g=" << g << " level " << k;
        }
    }
}

TEST(RtTwoPhoton, ZeroFieldAngleAndCorner) {
    const ModelParams p{1, 1, 0};
    EXPECT_EQ(rk::two_photon_angle(p), 0.0);
    const auto levels = rk::rt2_spectrum(p, 6);
    auto find = [&](int n, Branch b) {
        for (const auto& l : levels) {
            if (l.n == n && l.branch == b) {
                return l;
            }
        }
        throw std::logic_error("missing level");
    };
    EXPECT_NEAR(find(0, Branch::minus).energy, 0.0, 1e-15);
    EXPECT_NEAR(find(2, Branch::minus).energy, 2.0, 1e-15);
    for (int n = 3; n <= 6; ++n) {
        EXPECT_NEAR(find(n, Branch::minus).energy, n - 2.0, 1e-14);
        EXPECT_NEAR(find(n, Branch::plus).energy, n, 1e-14);
    }
    int spurious = 0;
    for (const auto& l : levels) {
        spurious += l.spurious ? 1 : 0;
    }
    EXPECT_EQ(spurious, 3);
}

TEST(RtTwoPhoton, CrossingsBecomeAvoided) {
    for (int n = 1; n <= 4; ++n) {
        const double gn = rk::resonance_loci(n, n, 1.0)[0].g;
        const ModelParams p{1, 1, gn};
        const double jc_gap = (n + gn * std::sqrt(n)) - (n + 2 - gn * std::sqrt(n + 2.0));
        EXPECT_NEAR(jc_gap, 0.0, 1e-14);
        double plus = 0.0;
        double minus = 0.0;
        for (const auto& l : rk::rt2_spectrum(p, n + 3)) {
            if (l.n == n + 2) {
                (l.branch == Branch::plus ? plus : minus) = l.energy;
            }
        }
        EXPECT_GT(plus - minus, 0.05) << n;
    }
}

TEST(RtTwoPhoton, CloserToExactThanJc) {
    const ModelParams p{1, 1, 0.4};
    const TruncationConfig t{60, 0};
    const auto exact = rk::parity_resolved_spectrum(p, t);
    auto max_error = [&](const std::vector<rk::ClosedFormLevel>& levels) {
        double worst = 0.0;
        for (const auto cls : {rk::Parity::even, rk::Parity::odd}) {
            std::vector<double> e;
            for (const auto& l : levels) {
                if (!l.spurious && l.parity == cls) {
                    e.push_back(l.energy);
                }
            }
            std::sort(e.begin(), e.end());
            const auto& x = cls == rk::Parity::even ? exact.even : exact.odd;
            for (int k = 0; k < 4; ++k) {
                worst = std::max(worst, std::abs(e[static_cast<std::size_t>(k)] - x(k)));
            }
        }
        return worst;
    };
    EXPECT_LT(max_error(rk::rt2_spectrum(p, 30)), max_error(rk::jc_spectrum(p, 30)));
}

TEST(GenericRt, IdentityWithoutResonantPart) {
    const TruncationConfig t{5, 0};
    Matrix h = Matrix::Zero(t.dim(), t.dim());
    for (int k = 0; k < t.dim(); ++k) {
        h(k, k) = 0.5 * k;
    }
    h(0, 3) = h(3, 0) = 0.01;
    const auto th = rk::generic_numeric_rt(h, t);
    EXPECT_LT(max_abs(th.op - h), 1e-15);
}

TEST(GenericRt, ReproducesOnePhotonSpectrumWithoutSpuriousLevel) {
    const ModelParams p{1, 1, 0.3};
    const TruncationConfig t{30, 0};
    const Matrix jc = jaynes_cummings(p, t);
    const auto th = rk::generic_numeric_rt(jc, t);
    EXPECT_TRUE(th.kernel.empty());
    std::vector<double> diag;
    for (int k = 0; k < t.dim(); ++k) {
        diag.push_back(th.op(k, k).real());
    }
    std::sort(diag.begin(), diag.end());
    const auto exact = rk::eigh(jc).values;
    for (int k = 0; k < t.dim(); ++k) {
        EXPECT_NEAR(diag[static_cast<std::size_t>(k)], exact(k), 1e-9);
    }
    Matrix off = th.op;
    off.diagonal().setZero();
    EXPECT_LT(max_abs(off), 1e-12);
}

TEST(StrongChain, ReferenceAndSpectrum) {
    const TruncationConfig t{60, 0};
    const ModelParams p{1, 1, 1.0};
    const Matrix h = rk::build_rabi(p, t);
    const auto th = rk::strong_chain(h, p, t);
    for (int n = 0; n < 10; ++n) {
        const double e = n + 0.5 - 1.0;
        EXPECT_DOUBLE_EQ(th.reference(basis_index(n, Atom::plus), basis_index(n, Atom::plus)).real(), e);
        EXPECT_DOUBLE_EQ(th.reference(basis_index(n, Atom::minus), basis_index(n, Atom::minus)).real(), e);
    }
    const auto a = rk::eigh(th.op).values;
    const auto b = rk::eigh(h).values;
    for (int k = 0; k < 60; ++k) {
        EXPECT_NEAR(a(k), b(k), 1e-8);
    }
}

TEST(StrongChain, ZeroFieldIsAtomicRotationOnly) {
    const TruncationConfig t{10, 0};
    const ModelParams p{1, 1, 0};
    const Matrix h = rk::build_rabi(p, t);
    const auto th = rk::strong_chain(h, p, t);
    const Matrix r = rk::isometry::rotation(t).matrix;
    EXPECT_LT(max_abs(th.op - r.adjoint() * h * r), 1e-14);
}

TEST(StrongChain, AveragedAndZeroFieldClosedForms) {
    const TruncationConfig t{80, 0};
    for (const double g : {0.1, 0.5, 1.0, 2.0}) {
        const ModelParams p{1, 1, g};
        const Matrix h = rk::build_rabi(p, t);
        const auto avg = rk::strong_avg_chain(h, p, t);
        const auto zf = rk::strong_rt_chain(h, p, t);
        EXPECT_EQ(zf.kernel_labels(), std::vector<std::string>({"|0,->"}));
        const int top = 30;
        for (const auto& l : rk::strong_avg_spectrum(p, top)) {
            const int k = basis_index(l.n, l.branch == Branch::plus ? Atom::plus : Atom::minus);
            EXPECT_NEAR(avg.reference(k, k).real(), l.energy, 1e-8) << "g=" << g << " n=" << l.n;
        }
        for (const auto& l : rk::strong_rt_spectrum(p, top)) {
            if (l.spurious) {
                continue;
            }
            const int k = basis_index(l.n, l.branch == Branch::plus ? Atom::plus : Atom::minus);
            EXPECT_NEAR(zf.reference(k, k).real(), l.energy, 1e-8) << "g=" << g << " n=" << l.n;
        }
    }
}

TEST(ZeroFieldRt, SpectrumPreservedAfterSpuriousRemoval) {
    const TruncationConfig t{60, 0};
    for (const double g : {0.0, 0.8}) {
        const ModelParams p{1, 1, g};
        const Matrix h = rk::build_rabi(p, t);
        const auto th = rk::strong_rt_chain(h, p, t);
        const auto cleaned = rk::spurious_filter(rk::eigh(th.op), th.kernel);
        const auto exact = rk::eigh(h).values;
        for (int k = 0; k < 40; ++k) {
            EXPECT_NEAR(cleaned.cleaned.values(k), exact(k), 1e-8) << "g=" << g;
        }
    }
}

TEST(Transforms, ParityCommutesThroughChains) {
    const TruncationConfig t{30, 0};
    const ModelParams p{1, 1, 0.6};
    const Matrix h = rk::build_rabi(p, t);
    const auto h1 = rk::rt_one_photon(h, t);
    for (const auto* th : {&h1}) {
        EXPECT_LE(max_abs(th->op * th->parity - th->parity * th->op), 1e-12);
    }
    const auto h2 = rk::rt_two_photon(h1, p, t);
    const auto h3 = rk::strong_rt_chain(h, p, t);
    EXPECT_LE(max_abs(h2.op * h2.parity - h2.parity * h2.op), 1e-12);
    EXPECT_LE(max_abs(h3.op * h3.parity - h3.parity * h3.op), 1e-12);
}

TEST(Transforms, SpuriousZeroCounts) {
    const TruncationConfig t{20, 0};
    EXPECT_EQ(rk::isometry::one_photon(t).kernel.size(), 1u);
    EXPECT_EQ(rk::isometry::two_photon(0.2, t).kernel.size(), 2u);
    EXPECT_EQ(rk::isometry::zero_field(t).kernel.size(), 1u);
    // g = 0: rt1 adds one zero to the single physical zero of the ground state
    const ModelParams p0{1, 1, 0};
    const Matrix h = rk::build_rabi(p0, t);
    EXPECT_EQ(zero_count(h), 1);
    EXPECT_EQ(zero_count(rk::rt_one_photon(h, t).op), 2);
}

TEST(SpuriousFilter, RemovesExactlyTheKernelLevels) {
    const TruncationConfig t{20, 0};
    const ModelParams p{1, 1, 0.2};
    const auto h1 = rk::rt_one_photon(rk::build_rabi(p, t), t);
    const auto d = rk::eigh(h1.op);
    const auto one = rk::spurious_filter(d, h1.kernel);
    EXPECT_EQ(one.cleaned.size(), d.size() - 1);
    const auto h2 = rk::rt_two_photon(h1, p, t);
    const auto two = rk::spurious_filter(rk::eigh(h2.op), h2.kernel);
    EXPECT_EQ(two.removed.size(), 3u);
    const auto none = rk::spurious_filter(d, {});
    EXPECT_EQ(none.cleaned.values, d.values);
    EXPECT_THROW(rk::spurious_filter(d, {basis_index(4, Atom::minus)}), std::runtime_error);
}

TEST(SpuriousFilter, KeepsPhysicalZeroInDegenerateGroup) {
    // g = 0: the physical ground level |0,-> and the spurious |0,+> are both zero
    const TruncationConfig t{10, 0};
    const auto h1 = rk::rt_one_photon(rk::build_rabi(ModelParams{1, 1, 0}, t), t);
    const auto r = rk::spurious_filter(rk::eigh(h1.op), h1.kernel);
    ASSERT_EQ(r.removed.size(), 1u);
    EXPECT_NEAR(r.cleaned.values(0), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(r.cleaned.vectors(basis_index(0, Atom::minus), 0)), 1.0, 1e-12);
}

TEST(Laguerre, ValuesAndRecurrence) {
    EXPECT_EQ(rk::laguerre(0, 0, 3.7), 1.0);
    EXPECT_NEAR(rk::laguerre(2, 0, 4.0), 1.0, 1e-14);
    for (int n = 1; n <= 10; ++n) {
        EXPECT_NEAR(rk::laguerre(n - 1, 1, 0.0), n, 1e-12);
    }
    EXPECT_THROW(rk::laguerre(-1, 0, 1.0), std::invalid_argument);
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> ux(0.0, 50.0);
    std::uniform_int_distribution<int> ua(0, 5);
    for (int trial = 0; trial < 200; ++trial) {
        const double x = ux(rng);
        const int a = ua(rng);
        for (int n = 1; n < 40; ++n) {
            const double lp = rk::laguerre(n + 1, a, x);
            const double l = rk::laguerre(n, a, x);
            const double lm = rk::laguerre(n - 1, a, x);
            const double residual = (n + 1) * lp - (2.0 * n + a + 1 - x) * l + (n + a) * lm;
            const double scale = std::max({std::abs((n + 1) * lp), std::abs((2.0 * n + a + 1 - x) * l),
                                           std::abs((n + a) * lm), 1e-300});
            EXPECT_LE(std::abs(residual), 1e-10 * scale);
        }
    }
}

TEST(ClosedForm, JcValues) {
    const ModelParams p{1, 1, 0.1};
    const auto levels = rk::jc_spectrum(p, 3);
    EXPECT_NEAR(levels[2].energy, 1.1, 1e-15);
    EXPECT_NEAR(levels[3].energy, 0.9, 1e-15);
    EXPECT_TRUE(levels[0].spurious);
    for (const auto& l : rk::jc_spectrum(p.with_g(0), 5)) {
        EXPECT_EQ(l.energy, static_cast<double>(l.n));
    }
}

TEST(ClosedForm, StrongAverageValues) {
    const ModelParams p{1, 0.6, 0};
    for (const auto& l : rk::strong_avg_spectrum(p, 5)) {
        EXPECT_NEAR(l.energy, l.n + 0.5 + (l.branch == Branch::plus ? -0.3 : 0.3), 1e-15);
    }
    const auto half = rk::strong_avg_spectrum(ModelParams{1, 1, 0.5}, 2);
    EXPECT_NEAR(half[2].energy, half[3].energy, 1e-15);
}

TEST(ClosedForm, StrongZeroFieldValues) {
    // at g = 0 the n = 1 pair is {1, 1}; see the notes on the zero-field example
    const auto levels = rk::strong_rt_spectrum(ModelParams{1, 1, 0}, 3);
    EXPECT_NEAR(levels[0].energy, 0.0, 1e-15);
    EXPECT_TRUE(levels[1].spurious);
    EXPECT_NEAR(levels[2].energy, 1.0, 1e-15);
    EXPECT_NEAR(levels[3].energy, 1.0, 1e-15);
    for (const double g : {0.3, 1.0, 4.0}) {
        const auto l = rk::strong_rt_spectrum(ModelParams{1, 1, g}, 2);
        EXPECT_TRUE(l[1].spurious);
        EXPECT_EQ(l[1].energy, 0.0);
    }
}

TEST(ClosedForm, StrongMethodsConvergeAtLargeCoupling) {
    double previous = 1e9;
    for (double g = 2.5; g <= 4.0 + 1e-12; g += 0.25) {
        const ModelParams p{1, 1, g};
        const auto a = non_spurious(rk::strong_avg_spectrum(p, 20));
        const auto b = non_spurious(rk::strong_rt_spectrum(p, 20));
        double diff = 0.0;
        for (std::size_t k = 0; k < 8; ++k) {
            diff = std::max(diff, std::abs(a[k] - b[k]));
        }
        EXPECT_LE(diff, previous + 1e-13) << "g=" << g;
        previous = diff;
    }
    EXPECT_LT(previous, 1e-10);
}

TEST(ClosedForm, DisplacementElements) {
    const ModelParams p{1, 1, 0.8};
    EXPECT_NEAR(rk::displacement_element(0, 0, p), std::exp(-2.0 * 0.64), 1e-15);
    EXPECT_NEAR(rk::diagonal_overlap(1, ModelParams{1, 1, 0.5}), 0.0, 1e-15);
    EXPECT_THROW(rk::displacement_element(-1, 0, p), std::invalid_argument);
    EXPECT_THROW(rk::displacement_element(1, 0, p, 2), std::invalid_argument);
    const TruncationConfig t{120, 0};
    const auto b = rk::build_boson_ops(t);
    for (const double g : {0.3, 1.0, 2.0}) {
        const Matrix u = oracle::expm((2.0 * g) * (b.a_dag - b.a));
        for (int m = 0; m <= 20; ++m) {
            for (int n = 0; n <= 20; ++n) {
                EXPECT_NEAR(rk::displacement_element(m, n, ModelParams{1, 1, g}), u(m, n).real(), 1e-10)
                    << "g=" << g << " m=" << m << " n=" << n;
            }
        }
    }
}

TEST(ClosedForm, DisplacementRegression) {
    EXPECT_NEAR(rk::displacement_element(5, 3, ModelParams{1, 1, 0.5}), 0.31645688329622, 1e-13);
    EXPECT_NEAR(rk::displacement_element(5, 3, ModelParams{1, 1, 2.0}), -0.23123614115340, 1e-13);
    EXPECT_TRUE(std::isfinite(rk::displacement_element(90, 70, ModelParams{1, 1, 2.0})));
}

TEST(ClosedForm, ResonanceLoci) {
    const auto loci = rk::resonance_loci(0, 30, 1.0);
    EXPECT_NEAR(loci[0].g, std::sqrt(2.0), 1e-15);
    EXPECT_TRUE(loci[0].active);
    EXPECT_FALSE(loci[1].active);
    double previous = 1e9;
    for (const auto& l : loci) {
        if (!l.active) {
            continue;
        }
        EXPECT_LT(l.g, previous);
        previous = l.g;
        const double a = l.n + l.g * std::sqrt(static_cast<double>(l.n));
        const double b = l.n + 2 - l.g * std::sqrt(l.n + 2.0);
        EXPECT_NEAR(a, b, 1e-13);
    }
    EXPECT_THROW(rk::resonance_loci(3, 2, 1.0), std::invalid_argument);
}
