// closed_form.hpp: Analytic effective spectra, Laguerre polynomials and
// displacement matrix elements, evaluated without any matrices.

#pragma once

#include "resonancekit/fock.hpp"
#include "resonancekit/spectrum.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace resonancekit {

struct ClosedFormLevel {
    int n{0};
    Branch branch{Branch::unassigned};
    double energy{0.0};
    std::string method;
    bool spurious{false};
    Parity parity{Parity::none};
};

// Generalized Laguerre polynomial L_n^(alpha)(x) by the three-term recurrence in n.
inline double laguerre(int n, int alpha, double x) {
    if (n < 0 || alpha < 0) {
        throw std::invalid_argument("laguerre: n and alpha must be >= 0");
    }
    double prev = 1.0;
    if (n == 0) {
        return prev;
    }
    double cur = 1.0 + alpha - x;
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

// Parity of the slot (n, +/-) after the one-photon shift: both atomic slots of
// photon block n carry -(-1)^n.
inline Parity dressed_parity(int n) { return (n % 2 == 0) ? Parity::odd : Parity::even; }

// omega n +/- g sqrt(n); the (0,+) entry is the kernel of the photon shift.
inline std::vector<ClosedFormLevel> jc_spectrum(const ModelParams& p, int n_top) {
    p.validate();
    std::vector<ClosedFormLevel> out;
    for (int n = 0; n <= n_top; ++n) {
        const double root = p.g * std::sqrt(static_cast<double>(n));
        out.push_back({n, Branch::plus, p.omega * n + root, "jc", n == 0, dressed_parity(n)});
        out.push_back({n, Branch::minus, p.omega * n - root, "jc", false, dressed_parity(n)});
    }
    return out;
}

// tan 2 theta = g sqrt2 / (2 omega - g sqrt2), 0 <= theta < pi/2
inline double two_photon_angle(const ModelParams& p) {
    const double s2 = std::sqrt(2.0);
    return 0.5 * std::atan2(p.g * s2, 2.0 * p.omega - p.g * s2);
}

inline std::vector<ClosedFormLevel> rt2_spectrum(const ModelParams& p, int n_top) {
    p.validate();
    if (n_top < 2) {
        throw std::invalid_argument("rt2_spectrum: n_top must be >= 2");
    }
    const double w = p.omega;
    const double g = p.g;
    const double s2 = std::sqrt(2.0);
    std::vector<ClosedFormLevel> out;
    const double detune = 2.0 * w - g * s2;
    const double r = 0.5 * std::sqrt(detune * detune + 2.0 * g * g);
    out.push_back({0, Branch::plus, 0.0, "rt2", true, dressed_parity(0)});
    out.push_back({0, Branch::minus, w - g / s2 - r, "rt2", false, dressed_parity(0)});
    out.push_back({1, Branch::plus, 0.0, "rt2", true, dressed_parity(1)});
    out.push_back({1, Branch::minus, w - g, "rt2", false, dressed_parity(1)});
    out.push_back({2, Branch::plus, 0.0, "rt2", true, dressed_parity(2)});
    out.push_back({2, Branch::minus, w - g / s2 + r, "rt2", false, dressed_parity(2)});
    for (int n = 3; n <= n_top; ++n) {
        const double a = std::sqrt(static_cast<double>(n - 2));
        const double b = std::sqrt(static_cast<double>(n));
        const double mid = w * (n - 1) + 0.5 * g * (a - b);
        const double t = -2.0 * w + g * (a + b);
        const double half = 0.5 * std::sqrt(t * t + g * g * (n - 1));
        out.push_back({n, Branch::plus, mid + half, "rt2", false, dressed_parity(n)});
        out.push_back({n, Branch::minus, mid - half, "rt2", false, dressed_parity(n)});
    }
    return out;
}

// omega (n + 1/2) - g^2/omega -/+ (omega0/2) exp(-2g^2/omega^2) L_n(4g^2/omega^2)
inline std::vector<ClosedFormLevel> strong_avg_spectrum(const ModelParams& p, int n_top) {
    p.validate();
    const double x = 4.0 * p.g * p.g / (p.omega * p.omega);
    const double damp = std::exp(-0.5 * x);
    const double shift = p.g * p.g / p.omega;
    std::vector<ClosedFormLevel> out;
    for (int n = 0; n <= n_top; ++n) {
        const double base = p.omega * (n + 0.5) - shift;
        const double split = 0.5 * p.omega0 * damp * laguerre(n, 0, x);
        const Parity plus_parity = dressed_parity(n);
        const Parity minus_parity = plus_parity == Parity::even ? Parity::odd : Parity::even;
        out.push_back({n, Branch::plus, base - split, "strong_avg", false, plus_parity});
        out.push_back({n, Branch::minus, base + split, "strong_avg", false, minus_parity});
    }
    return out;
}

// Zero-field resonances treated by the lower-state photon shift; (0,-) is its kernel.
inline std::vector<ClosedFormLevel> strong_rt_spectrum(const ModelParams& p, int n_top) {
    p.validate();
    const double w = p.omega;
    const double x = 4.0 * p.g * p.g / (w * w);
    const double damp = std::exp(-0.5 * x);
    const double shift = p.g * p.g / w;
    std::vector<ClosedFormLevel> out;
    out.push_back({0, Branch::plus, 0.5 * w - shift - 0.5 * w * damp, "strong_rt", false, dressed_parity(0)});
    out.push_back({0, Branch::minus, 0.0, "strong_rt", true, dressed_parity(0)});
    for (int n = 1; n <= n_top; ++n) {
        const double ln = laguerre(n, 0, x);
        const double lm = laguerre(n - 1, 0, x);
        const double l1 = laguerre(n - 1, 1, x);
        const double mid = n * w - shift - 0.25 * w * damp * (ln - lm);
        const double t = w - 0.5 * w * damp * (ln + lm);
        const double c = 4.0 * p.g * p.g / n * damp * damp * l1 * l1;
        const double half = 0.5 * std::sqrt(t * t + c);
        out.push_back({n, Branch::plus, mid + half, "strong_rt", false, dressed_parity(n)});
        out.push_back({n, Branch::minus, mid - half, "strong_rt", false, dressed_parity(n)});
    }
    return out;
}

// <m| exp(s 2g/omega (a_dag - a)) |n>, s = +1 or -1.
inline double displacement_element(int m, int n, const ModelParams& p, int sign = +1) {
    if (m < 0 || n < 0) {
        throw std::invalid_argument("displacement_element: indices must be >= 0");
    }
    if (sign != 1 && sign != -1) {
        throw std::invalid_argument("displacement_element: sign must be +1 or -1");
    }
    double alpha = sign * 2.0 * p.g / p.omega;
    const double x = alpha * alpha;
    if (m < n) {
        std::swap(m, n);
        alpha = -alpha;
    }
    const int k = m - n;
    const double lag = laguerre(n, k, x);
    if (k == 0) {
        return std::exp(-0.5 * x) * lag;
    }
    if (alpha == 0.0) {
        return 0.0;
    }
    const double log_mag = 0.5 * (std::lgamma(n + 1.0) - std::lgamma(m + 1.0)) + k * std::log(std::abs(alpha)) - 0.5 * x;
    const double sgn = (alpha < 0.0 && k % 2 == 1) ? -1.0 : 1.0;
    return sgn * std::exp(log_mag) * lag;
}

// f_n = <n| exp(2g/omega (a_dag - a)) |n> = exp(-2g^2/omega^2) L_n(4g^2/omega^2)
inline double diagonal_overlap(int n, const ModelParams& p) { return displacement_element(n, n, p); }

struct ResonanceLocus {
    int n{0};
    double g{0.0};
    bool active{true};  // false for the parity-forbidden (mute) family
    int lower_photon{0};  // slot (lower_photon, +)
    int upper_photon{0};  // slot (upper_photon, -)
};

// Active loci 2 omega / (sqrt n + sqrt(n+2)) for (n,+)/(n+2,-) and mute loci
// omega / (sqrt n + sqrt(n+1)) for (n,+)/(n+1,-).
inline std::vector<ResonanceLocus> resonance_loci(int n_first, int n_last, double omega) {
    if (!(omega > 0.0)) {
        throw std::invalid_argument("resonance_loci: omega must be > 0");
    }
    if (n_first < 0 || n_last < n_first) {
        throw std::invalid_argument("resonance_loci: invalid n range");
    }
    std::vector<ResonanceLocus> out;
    for (int n = n_first; n <= n_last; ++n) {
        const double a = std::sqrt(static_cast<double>(n));
        out.push_back({n, 2.0 * omega / (a + std::sqrt(n + 2.0)), true, n, n + 2});
        out.push_back({n, omega / (a + std::sqrt(n + 1.0)), false, n, n + 1});
    }
    return out;
}

}  // namespace resonancekit
