// methods.hpp: Per-coupling level sets for every approximation scheme, the
// iterated two-photon chain, and KAM refinement on a low-energy window.

#pragma once

#include "resonancekit/averaging.hpp"
#include "resonancekit/closed_form.hpp"
#include "resonancekit/fock.hpp"
#include "resonancekit/kam.hpp"
#include "resonancekit/spectrum.hpp"
#include "resonancekit/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace resonancekit {

enum class Method {
    exact,
    jc,
    rt1,
    rt1_kam,
    rt2,
    rt2_iter_2,
    rt2_iter_3,
    rt2_iter_4,
    rt_full_kam,
    strong_avg,
    strong_rt,
};

inline const std::vector<Method>& all_methods() {
    static const std::vector<Method> m{Method::exact,      Method::jc,         Method::rt1,        Method::rt1_kam,
                                       Method::rt2,        Method::rt2_iter_2, Method::rt2_iter_3, Method::rt2_iter_4,
                                       Method::rt_full_kam, Method::strong_avg, Method::strong_rt};
    return m;
}

// Deduplicated, in the order of all_methods().
inline std::vector<Method> canonical_methods(const std::vector<Method>& methods) {
    std::vector<Method> out;
    for (const Method m : all_methods()) {
        if (std::find(methods.begin(), methods.end(), m) != methods.end()) {
            out.push_back(m);
        }
    }
    return out;
}

inline std::string to_string(Method m) {
    switch (m) {
        case Method::exact: return "exact";
        case Method::jc: return "jc";
        case Method::rt1: return "rt1";
        case Method::rt1_kam: return "rt1_kam";
        case Method::rt2: return "rt2";
        case Method::rt2_iter_2: return "rt2_iter_2";
        case Method::rt2_iter_3: return "rt2_iter_3";
        case Method::rt2_iter_4: return "rt2_iter_4";
        case Method::rt_full_kam: return "rt_full_kam";
        case Method::strong_avg: return "strong_avg";
        case Method::strong_rt: return "strong_rt";
    }
    return "unknown";
}

inline std::optional<Method> parse_method(const std::string& name) {
    for (const Method m : all_methods()) {
        if (to_string(m) == name) {
            return m;
        }
    }
    return std::nullopt;
}

// Number of two-photon transformations in a weak-coupling method (0 if none).
inline int two_photon_depth(Method m) {
    switch (m) {
        case Method::rt2: return 1;
        case Method::rt2_iter_2: return 2;
        case Method::rt2_iter_3: return 3;
        case Method::rt2_iter_4:
        case Method::rt_full_kam: return 4;
        default: return 0;
    }
}

// Methods whose construction assumes the one-photon resonance omega0 = omega.
inline bool requires_resonance(Method m) {
    return m != Method::exact && m != Method::strong_avg;
}

struct MethodLevel {
    double energy{0.0};
    Branch branch{Branch::unassigned};
    int photon{-1};
    Parity parity{Parity::none};
    bool spurious{false};
};

inline void sort_levels(std::vector<MethodLevel>& levels) {
    std::stable_sort(levels.begin(), levels.end(), [](const MethodLevel& a, const MethodLevel& b) {
        if (a.energy != b.energy) {
            return a.energy < b.energy;
        }
        if (a.photon != b.photon) {
            return a.photon < b.photon;
        }
        return static_cast<int>(a.branch) < static_cast<int>(b.branch);
    });
}

inline Parity parity_label(double expectation) {
    return std::abs(expectation) >= 0.99 ? parity_from_sign(expectation) : Parity::unclassified;
}

inline std::vector<MethodLevel> levels_from_closed_form(const std::vector<ClosedFormLevel>& cf) {
    std::vector<MethodLevel> out;
    for (const ClosedFormLevel& l : cf) {
        out.push_back({l.energy, l.branch, l.n, l.parity, l.spurious});
    }
    sort_levels(out);
    return out;
}

// One level per slot of a diagonal reference; kernel slots are spurious zeros.
inline std::vector<MethodLevel> levels_from_reference(const TransformedHamiltonian& th) {
    std::vector<MethodLevel> out;
    for (int k = 0; k < th.reference.rows(); ++k) {
        MethodLevel l;
        l.photon = photon_of(k);
        l.branch = branch_of(atom_of(k));
        l.spurious = th.is_kernel(k);
        l.energy = l.spurious ? 0.0 : th.reference(k, k).real();
        l.parity = l.spurious ? Parity::none : parity_label(th.parity(k, k).real());
        out.push_back(l);
    }
    sort_levels(out);
    return out;
}

inline std::vector<MethodLevel> levels_from_exact(const EigenDecomposition& d) {
    std::vector<MethodLevel> out;
    for (Eigen::Index j = 0; j < d.size(); ++j) {
        out.push_back({d.values(j), Branch::unassigned, -1, d.parity[static_cast<std::size_t>(j)], false});
    }
    return out;
}

// Slots of a diagonal reference that are not kernels and lie at or below
// e_max, widened if needed so that at least min_count slots are included.
inline std::vector<int> energy_window(const TransformedHamiltonian& th, double e_max, int min_count) {
    std::vector<int> slots;
    for (int k = 0; k < th.reference.rows(); ++k) {
        if (!th.is_kernel(k)) {
            slots.push_back(k);
        }
    }
    std::stable_sort(slots.begin(), slots.end(),
                     [&](int a, int b) { return th.reference(a, a).real() < th.reference(b, b).real(); });
    if (min_count > 0 && static_cast<std::size_t>(min_count) <= slots.size()) {
        e_max = std::max(e_max, th.reference(slots[min_count - 1], slots[min_count - 1]).real());
    }
    std::vector<int> out;
    for (const int k : slots) {
        if (th.reference(k, k).real() <= e_max + 1e-9) {
            out.push_back(k);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline Matrix restrict_to(const Matrix& m, const std::vector<int>& slots) {
    const auto n = static_cast<Eigen::Index>(slots.size());
    Matrix out(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            out(i, j) = m(slots[static_cast<std::size_t>(i)], slots[static_cast<std::size_t>(j)]);
        }
    }
    return out;
}

struct WindowedKam {
    std::vector<int> slots;
    KamResult result;
    std::vector<MethodLevel> levels;  // window levels plus spurious kernel zeros
};

// KAM iteration on the low-energy window of a transformed operator. Outside
// such a window the high photon blocks carry resonances at arbitrarily small
// coupling and the iteration cannot contract.
inline WindowedKam windowed_kam(const TransformedHamiltonian& th, double e_max, int min_count,
                                const KamOptions& options) {
    WindowedKam out;
    out.slots = energy_window(th, e_max, min_count);
    const Matrix ref = restrict_to(th.reference, out.slots);
    const Matrix v = restrict_to(th.op, out.slots) - ref;
    out.result = kam_iterate(ref, v, options);
    const Matrix parity = restrict_to(th.parity, out.slots);
    const EigenDecomposition& est = out.result.estimate;
    for (Eigen::Index j = 0; j < est.size(); ++j) {
        const Eigen::Index d = detail::dominant_index(est.vectors.col(j));
        const int k = out.slots[static_cast<std::size_t>(d)];
        const double p = (est.vectors.col(j).adjoint() * parity * est.vectors.col(j))(0, 0).real();
        out.levels.push_back({est.values(j), branch_of(atom_of(k)), photon_of(k), parity_label(p), false});
    }
    for (const int k : th.kernel) {
        out.levels.push_back({0.0, branch_of(atom_of(k)), photon_of(k), Parity::none, true});
    }
    sort_levels(out.levels);
    return out;
}

struct ChainOptions {
    double scan_g_max{2.0};  // in units of omega
    int scan_steps{201};
    double window{10.0};     // energy window for crossing detection, units of omega
    double tol_active{1e-10};
    double tol_deg{1e-8};
};

// Pairs of non-kernel slots whose reference energies cross between adjacent
// scan points below the window and are coupled there; returns the connected
// groups of such pairs.
class CrossingScan {
public:
    explicit CrossingScan(int dim) : parent_(static_cast<std::size_t>(dim)) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }

    void add_point(const TransformedHamiltonian& th, double e_max, double tol_active) {
        const Eigen::Index dim = th.op.rows();
        RealVector ref = th.reference.diagonal().real();
        if (have_prev_) {
            for (Eigen::Index i = 0; i < dim; ++i) {
                if (th.is_kernel(static_cast<int>(i))) {
                    continue;
                }
                for (Eigen::Index j = i + 1; j < dim; ++j) {
                    if (th.is_kernel(static_cast<int>(j))) {
                        continue;
                    }
                    const double d0 = prev_ref_(i) - prev_ref_(j);
                    const double d1 = ref(i) - ref(j);
                    if (!(d0 * d1 < 0.0)) {
                        continue;
                    }
                    if (std::max(ref(i), ref(j)) > e_max) {
                        continue;
                    }
                    const double v = std::max(std::abs(prev_op_(i, j)), std::abs(th.op(i, j)));
                    if (v > tol_active) {
                        unite(static_cast<int>(i), static_cast<int>(j));
                    }
                }
            }
        }
        prev_ref_ = std::move(ref);
        prev_op_ = th.op;
        have_prev_ = true;
    }

    std::vector<std::vector<int>> groups() {
        std::vector<std::vector<int>> by_root(parent_.size());
        for (int i = 0; i < static_cast<int>(parent_.size()); ++i) {
            by_root[static_cast<std::size_t>(find(i))].push_back(i);
        }
        std::vector<std::vector<int>> out;
        for (auto& g : by_root) {
            if (g.size() > 1) {
                out.push_back(std::move(g));
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    int find(int x) {
        while (parent_[static_cast<std::size_t>(x)] != x) {
            parent_[static_cast<std::size_t>(x)] = parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(x)])];
            x = parent_[static_cast<std::size_t>(x)];
        }
        return x;
    }

    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent_[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
        }
    }

    std::vector<int> parent_;
    RealVector prev_ref_;
    Matrix prev_op_;
    bool have_prev_{false};
};

// One-photon RT followed by up to four two-photon RTs. The first two-photon
// step is the analytic one; later steps are generic block rotations over
// crossing groups found once, on a fixed coupling grid, at construction.
// Immutable after construction and safe to share between threads.
class WeakCouplingChain {
public:
    WeakCouplingChain(double omega, const TruncationConfig& trunc, int depth, const ChainOptions& options = {})
        : omega_(omega), trunc_(trunc), depth_(depth), options_(options) {
        if (depth < 1 || depth > 4) {
            throw std::invalid_argument("WeakCouplingChain: depth must be in [1, 4]");
        }
        if (!(omega > 0.0)) {
            throw std::invalid_argument("WeakCouplingChain: omega must be > 0");
        }
        if (options.scan_steps < 2) {
            throw std::invalid_argument("WeakCouplingChain: scan_steps must be >= 2");
        }
        support_ = two_photon_support(omega, trunc, options.tol_deg);
        if (depth_ < 2) {
            return;
        }
        std::vector<double> grid;
        for (int i = 0; i < options.scan_steps; ++i) {
            grid.push_back(omega * options.scan_g_max * i / (options.scan_steps - 1));
        }
        std::vector<TransformedHamiltonian> current;
        current.reserve(grid.size());
        for (const double g : grid) {
            current.push_back(stage(g, 1));
        }
        for (int k = 2; k <= depth_; ++k) {
            CrossingScan scan(trunc.dim());
            for (const auto& th : current) {
                scan.add_point(th, options.window * omega, options.tol_active);
            }
            groups_.push_back(scan.groups());
            if (k < depth_) {
                for (auto& th : current) {
                    th = generic_numeric_rt(th, groups_.back());
                }
            }
        }
    }

    int depth() const noexcept { return depth_; }
    const TruncationConfig& truncation() const noexcept { return trunc_; }
    const SupportMask& support() const noexcept { return support_; }

    // Groups rotated by the k-th two-photon step, k >= 2.
    const std::vector<std::vector<int>>& groups(int k) const {
        if (k < 2 || k > depth_) {
            throw std::out_of_range("WeakCouplingChain::groups: k out of range");
        }
        return groups_[static_cast<std::size_t>(k - 2)];
    }

    TransformedHamiltonian one_photon(double g) const {
        return rt_one_photon(build_rabi(ModelParams{omega_, omega_, g}, trunc_), trunc_);
    }

    // Output after k two-photon transformations, k = 0 .. depth.
    TransformedHamiltonian stage(double g, int k) const {
        if (k < 0 || k > depth_) {
            throw std::out_of_range("WeakCouplingChain::stage: k out of range");
        }
        TransformedHamiltonian th = one_photon(g);
        if (k == 0) {
            return th;
        }
        th = rt_two_photon(th, ModelParams{omega_, omega_, g}, trunc_, support_);
        for (int s = 2; s <= k; ++s) {
            th = generic_numeric_rt(th, groups_[static_cast<std::size_t>(s - 2)]);
        }
        return th;
    }

private:
    double omega_;
    TruncationConfig trunc_;
    int depth_;
    ChainOptions options_;
    SupportMask support_;
    std::vector<std::vector<std::vector<int>>> groups_;
};

struct EvaluatorOptions {
    double tol_deg{1e-8};
    double tol_active{1e-10};
    double kam_window{10.0};  // units of omega
    int kam_steps{1};
    int min_levels{12};       // the KAM window always holds at least this many levels
    ChainOptions chain{};
};

// Computes the level set of any method at a given coupling. Holds the
// coupling-independent precomputation (two-photon support and crossing
// groups); evaluate() is const and thread-safe.
class MethodEvaluator {
public:
    MethodEvaluator(double omega, double omega0, const TruncationConfig& trunc, const std::vector<Method>& methods,
                    const EvaluatorOptions& options = {})
        : omega_(omega), omega0_(omega0), trunc_(trunc), options_(options) {
        ModelParams{omega, omega0, 0.0}.validate();
        trunc.validate();
        int depth = 0;
        for (const Method m : methods) {
            if (requires_resonance(m) && omega0 != omega) {
                throw std::invalid_argument("method " + to_string(m) + " requires omega0 == omega");
            }
            depth = std::max(depth, two_photon_depth(m));
        }
        if (depth > 0) {
            ChainOptions co = options.chain;
            co.tol_active = options.tol_active;
            co.tol_deg = options.tol_deg;
            chain_ = std::make_shared<const WeakCouplingChain>(omega, trunc, depth, co);
        }
    }

    const WeakCouplingChain* chain() const noexcept { return chain_.get(); }

    std::vector<MethodLevel> evaluate(Method m, double g) const {
        const ModelParams p{omega_, omega0_, g};
        p.validate();
        const int top = trunc_.n_max;
        switch (m) {
            case Method::exact:
                return levels_from_exact(exact_spectrum(p, trunc_));
            case Method::jc:
                return levels_from_closed_form(jc_spectrum(p, top));
            case Method::rt2:
                return levels_from_closed_form(rt2_spectrum(p, top));
            case Method::strong_avg:
                return levels_from_closed_form(strong_avg_spectrum(p, top));
            case Method::strong_rt:
                return levels_from_closed_form(strong_rt_spectrum(p, top));
            case Method::rt1:
                return levels_from_reference(rt_one_photon(build_rabi(p, trunc_), trunc_));
            case Method::rt1_kam:
                return kam_levels(rt_one_photon(build_rabi(p, trunc_), trunc_));
            case Method::rt2_iter_2:
            case Method::rt2_iter_3:
            case Method::rt2_iter_4:
                return levels_from_reference(require_chain().stage(g, two_photon_depth(m)));
            case Method::rt_full_kam:
                return kam_levels(require_chain().stage(g, 4));
        }
        throw std::invalid_argument("evaluate: unknown method");
    }

private:
    const WeakCouplingChain& require_chain() const {
        if (!chain_) {
            throw std::logic_error("evaluate: evaluator was built without the two-photon chain");
        }
        return *chain_;
    }

    std::vector<MethodLevel> kam_levels(const TransformedHamiltonian& th) const {
        KamOptions ko;
        ko.max_steps = options_.kam_steps;
        ko.tol_deg = options_.tol_deg;
        return windowed_kam(th, options_.kam_window * omega_, options_.min_levels + 1, ko).levels;
    }

    double omega_;
    double omega0_;
    TruncationConfig trunc_;
    EvaluatorOptions options_;
    std::shared_ptr<const WeakCouplingChain> chain_;
};

}  // namespace resonancekit
