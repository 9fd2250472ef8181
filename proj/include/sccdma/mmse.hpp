#pragma once

// Scalar ingredients of density evolution: the Gaussian tail function and
// the MMSE of a BPSK symbol observed in AWGN at a given SNR.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

#include "sccdma/errors.hpp"

namespace sccdma {

/// P(Z > x) for a standard normal Z.
inline double qfunc(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

/// BER of a BPSK symbol whose effective SNR is `sir`.
inline double ber_of(double sir) {
    if (!(sir >= 0.0)) throw DomainError("ber_of: sir must be nonnegative");
    return qfunc(std::sqrt(sir));
}

/// Nodes and weights for  integral f(t) exp(-t^2) dt  on the real line.
struct GaussHermite {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussHermite(int n) : nodes(n), weights(n) {
        // Newton iteration on orthonormal Hermite polynomials, with the usual
        // asymptotic starting guesses for the largest roots.
        const double pim4 = 0.7511255444649425; // pi^(-1/4)
        const int half = (n + 1) / 2;
        double z = 0.0;
        for (int i = 0; i < half; ++i) {
            if (i == 0)
                z = std::sqrt(2.0 * n + 1) - 1.85575 * std::pow(2.0 * n + 1, -0.16667);
            else if (i == 1)
                z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
            else if (i == 2)
                z = 1.86 * z - 0.86 * nodes[0];
            else if (i == 3)
                z = 1.91 * z - 0.91 * nodes[1];
            else
                z = 2.0 * z - nodes[i - 2];

            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p1 = pim4, p2 = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double p3 = p2;
                    p2 = p1;
                    p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
                }
                pp = std::sqrt(2.0 * n) * p2;
                const double z1 = z;
                z = z1 - p1 / pp;
                if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
            }
            nodes[i] = z;
            nodes[n - 1 - i] = -z;
            weights[i] = weights[n - 1 - i] = 2.0 / (pp * pp);
        }
        if (n % 2 == 1) nodes[half - 1] = 0.0;
    }
};

/// Nodes and weights for  integral f(t) dt  on [-1, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussLegendre(int n) : nodes(n), weights(n) {
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p1 = 1.0, p2 = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double p3 = p2;
                    p2 = p1;
                    p1 = ((2.0 * j + 1) * z * p2 - j * p3) / (j + 1);
                }
                pp = n * (z * p1 - p2) / (z * z - 1.0);
                const double z1 = z;
                z = z1 - p1 / pp;
                if (std::abs(z - z1) <= 1e-15) break;
            }
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
        }
    }
};

namespace detail {

template <class Rule>
const Rule& cached_rule(int n) {
    static std::mutex lock;
    static std::map<int, std::unique_ptr<Rule>> cache;
    std::lock_guard guard(lock);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<Rule>(n);
    return *slot;
}

} // namespace detail

/// Rule for the given order, built once and shared.
inline const GaussHermite& gauss_hermite(int n) { return detail::cached_rule<GaussHermite>(n); }

inline const GaussLegendre& gauss_legendre(int n) { return detail::cached_rule<GaussLegendre>(n); }

inline constexpr int default_quadrature_order = 64;
// Above this SNR the MMSE is below 1e-10 and is returned as 0.
inline constexpr double mmse_cutoff = 50.0;
// Gauss-Hermite is used up to this SNR. Beyond it the poles of tanh come too
// close to the real axis after scaling, and a composite rule in u takes over.
inline constexpr double hermite_max_snr = 0.5;

namespace detail {

// 1 - tanh(u) = 2 / (1 + e^{2u}), without cancellation for large u.
inline double one_minus_tanh(double u) {
    if (u > 0) {
        const double e = std::exp(-2.0 * u);
        return 2.0 * e / (1.0 + e);
    }
    return 2.0 / (1.0 + std::exp(2.0 * u));
}

// sech^2(u) (1 - tanh u) = 8 e^{2u} / (1 + e^{2u})^3.
inline double sech2_one_minus_tanh(double u) {
    if (u > 0) {
        const double e = std::exp(-2.0 * u);
        return 8.0 * e * e / ((1.0 + e) * (1.0 + e) * (1.0 + e));
    }
    const double e = std::exp(2.0 * u);
    return 8.0 * e / ((1.0 + e) * (1.0 + e) * (1.0 + e));
}

template <class F>
double hermite_expectation(double x, const GaussHermite& rule, F&& f) {
    // E[f(x + sqrt(x) Z)], Z ~ N(0,1), with Z = sqrt(2) t.
    const double scale = std::sqrt(2.0 * x);
    double acc = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k)
        acc += rule.weights[k] * f(x + scale * rule.nodes[k]);
    return acc / std::sqrt(std::numbers::pi);
}

// E[f(u)], u ~ N(x, x), for f that tends to `left` below u = -20 and to 0
// above u = 20 (both within e^-40). Composite 10-point Gauss-Legendre in u
// with panels no wider than 1 and half a standard deviation.
template <class F>
double panel_expectation(double x, double left, F&& f) {
    constexpr double edge = 20.0;
    const double sd = std::sqrt(x);
    const double a = std::max(x - 12.0 * sd, -edge);
    const double b = std::min(x + 12.0 * sd, edge);
    double acc = a > -edge ? 0.0 : left * qfunc((edge + x) / sd);
    if (b <= a) return acc;
    const auto& rule = gauss_legendre(10);
    const int panels = static_cast<int>(std::ceil((b - a) / std::min(1.0, 0.5 * sd)));
    const double half = 0.5 * (b - a) / panels;
    const double norm = half / (sd * std::sqrt(2.0 * std::numbers::pi));
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (2 * p + 1) * half;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            const double u = mid + half * rule.nodes[k];
            const double z = (u - x) / sd;
            acc += norm * rule.weights[k] * std::exp(-0.5 * z * z) * f(u);
        }
    }
    return acc;
}

} // namespace detail

/// MMSE of a +-1 symbol in AWGN at SNR x: 1 - E[tanh(x + sqrt(x) Z)].
inline double mmse_bpsk(double x, int order = default_quadrature_order) {
    if (!(x >= 0.0)) throw DomainError("mmse_bpsk: SNR must be nonnegative");
    if (x == 0.0) return 1.0;
    if (x > mmse_cutoff) return 0.0;
    if (x <= hermite_max_snr) return detail::hermite_expectation(x, gauss_hermite(order), detail::one_minus_tanh);
    return detail::panel_expectation(x, 2.0, detail::one_minus_tanh);
}

/// d/dx mmse_bpsk(x) = -E[sech^2(u) (1 - tanh u)], u = x + sqrt(x) Z.
inline double mmse_bpsk_derivative(double x, int order = default_quadrature_order) {
    if (!(x >= 0.0)) throw DomainError("mmse_bpsk_derivative: SNR must be nonnegative");
    if (x > mmse_cutoff) return 0.0;
    if (x == 0.0) return -1.0;
    if (x <= hermite_max_snr)
        return -detail::hermite_expectation(x, gauss_hermite(order), detail::sech2_one_minus_tanh);
    return -detail::panel_expectation(x, 0.0, detail::sech2_one_minus_tanh);
}

/// Piecewise cubic Hermite table of mmse_bpsk on [0, mmse_cutoff].
///
/// Knot slopes are the exact derivatives, clipped by the Fritsch-Carlson
/// condition so the interpolant stays monotone.
class MmseTable {
public:
    static constexpr int default_points = 4096;

    explicit MmseTable(int points = default_points, int order = default_quadrature_order)
        : step_(mmse_cutoff / (points - 1)), value_(points), slope_(points) {
        if (points < 2) throw RangeError("MMSE table needs at least two points");
        for (int k = 0; k < points; ++k) {
            const double x = k * step_;
            value_[k] = mmse_bpsk(x, order);
            slope_[k] = mmse_bpsk_derivative(x, order);
        }
        for (int k = 0; k + 1 < points; ++k) {
            const double secant = (value_[k + 1] - value_[k]) / step_;
            if (secant == 0.0) {
                slope_[k] = slope_[k + 1] = 0.0;
                continue;
            }
            const double a = slope_[k] / secant;
            const double b = slope_[k + 1] / secant;
            if (a < 0.0) slope_[k] = 0.0;
            if (b < 0.0) slope_[k + 1] = 0.0;
            const double r = a * a + b * b;
            if (r > 9.0) {
                const double t = 3.0 / std::sqrt(r);
                slope_[k] = t * a * secant;
                slope_[k + 1] = t * b * secant;
            }
        }
    }

    double operator()(double x) const {
        if (!(x >= 0.0)) throw DomainError("mmse table: SNR must be nonnegative");
        if (x >= mmse_cutoff) return x > mmse_cutoff ? 0.0 : value_.back();
        const auto k = std::min(static_cast<std::size_t>(x / step_), value_.size() - 2);
        const double t = (x - k * step_) / step_;
        const double t2 = t * t, t3 = t2 * t;
        const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
        const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
        return h00 * value_[k] + h10 * step_ * slope_[k] + h01 * value_[k + 1] +
               h11 * step_ * slope_[k + 1];
    }

private:
    double step_;
    std::vector<double> value_;
    std::vector<double> slope_;
};

/// The MMSE nonlinearity used by density evolution: either direct
/// quadrature or the shared lookup table. Cheap to copy.
class MmseFunction {
public:
    static MmseFunction direct(int order = default_quadrature_order) {
        MmseFunction f;
        f.order_ = order;
        return f;
    }

    static MmseFunction tabulated() {
        static const auto table = std::make_shared<const MmseTable>();
        MmseFunction f;
        f.table_ = table;
        return f;
    }

    bool uses_table() const noexcept { return table_ != nullptr; }

    double operator()(double x) const { return table_ ? (*table_)(x) : mmse_bpsk(x, order_); }

private:
    MmseFunction() = default;
    int order_ = default_quadrature_order;
    std::shared_ptr<const MmseTable> table_;
};

} // namespace sccdma
