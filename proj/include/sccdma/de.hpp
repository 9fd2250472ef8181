#pragma once

// Coupled density evolution for spatially coupled CDMA in the large-system
// limit:
//
//   sigma2_l(i) = sigma2 + alpha_l * sum_m b2[l][m] * mmse(sir_m(i-1))
//   sir_m(i)    = sum_l b2[l][m] / sigma2_l(i)
//
// from sir_m(0) = 0, with alpha_l = alpha_tr on training rows and alpha on
// propagation rows. The BER at position m is Q(sqrt(sir_m)).

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "sccdma/coupling.hpp"
#include "sccdma/errors.hpp"
#include "sccdma/mmse.hpp"

namespace sccdma {

inline constexpr int default_max_iter = 1000;
inline constexpr double default_sir_tol = 1e-8;

/// 1/sigma^2 expressed in dB -> sigma^2.
inline double sigma2_from_snr_db(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

struct SystemScenario {
    double sigma2 = 0.1;
    double alpha_tr = 1.45;
    double alpha = 1.9;
    TrainingAssignment training;

    void validate() const {
        if (!(sigma2 > 0.0)) throw RangeError("noise variance must be positive");
        if (!(alpha_tr > 0.0) || !(alpha > 0.0)) throw RangeError("loads must be positive");
    }

    /// Per-row load: alpha_tr on training rows, alpha elsewhere.
    std::vector<double> row_loads(int L) const {
        std::vector<double> out(L, alpha);
        for (int l : training.indices()) {
            if (l >= L) throw DimensionError("training index exceeds chain length");
            out[l] = alpha_tr;
        }
        return out;
    }
};

struct DeState {
    std::vector<double> sir;
    std::vector<double> sigma2_rows;
    int iteration = 0;

    /// The all-zero start; rows carry the bare noise variance.
    static DeState initial(int L, double sigma2) {
        return {std::vector<double>(L, 0.0), std::vector<double>(L, sigma2), 0};
    }
};

namespace detail {

inline void check_dimensions(const DeState& s, const BaseMatrix& B, const SystemScenario& scen) {
    const auto L = static_cast<std::size_t>(B.size());
    if (s.sir.size() != L || s.sigma2_rows.size() != L)
        throw DimensionError("DE state has " + std::to_string(s.sir.size()) +
                             " positions, base matrix has " + std::to_string(L));
    if (scen.training.tau() > 0 && scen.training.chain_length() != B.size())
        throw DimensionError("training assignment length does not match base matrix");
}

// One Jacobi sweep with precomputed row loads.
inline DeState step(const DeState& s, const BaseMatrix& B, double sigma2,
                    const std::vector<double>& loads, const MmseFunction& mmse) {
    const int L = B.size();
    std::vector<double> err(L);
    for (int m = 0; m < L; ++m) err[m] = mmse(s.sir[m]);

    DeState next{std::vector<double>(L, 0.0), std::vector<double>(L), s.iteration + 1};
    for (int l = 0; l < L; ++l) {
        const auto row = B.row(l);
        double acc = 0.0;
        for (int m = 0; m < L; ++m) acc += row[m] * err[m];
        next.sigma2_rows[l] = sigma2 + loads[l] * acc;
    }
    for (int l = 0; l < L; ++l) {
        const auto row = B.row(l);
        const double inv = 1.0 / next.sigma2_rows[l];
        for (int m = 0; m < L; ++m) next.sir[m] += row[m] * inv;
    }
    return next;
}

inline double max_change(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
    return d;
}

} // namespace detail

/// One parallel DE update; the row variances use the incoming sir.
inline DeState de_step(const DeState& state, const BaseMatrix& B, const SystemScenario& scen,
                       const MmseFunction& mmse = MmseFunction::direct()) {
    scen.validate();
    detail::check_dimensions(state, B, scen);
    return detail::step(state, B, scen.sigma2, scen.row_loads(B.size()), mmse);
}

struct DeOutcome {
    DeState state;
    bool converged = false;
    int iterations = 0;
};

/// Iterates from the zero state until max |delta sir| < tol or max_iter
/// steps. `observe` sees every state, including the initial one, and may
/// return false to stop early (the outcome is then not converged).
template <class Observer>
DeOutcome iterate_de(const BaseMatrix& B, const SystemScenario& scen, int max_iter, double tol,
                     const MmseFunction& mmse, Observer&& observe) {
    if (max_iter < 1) throw RangeError("max_iter must be at least 1");
    if (!(tol > 0.0)) throw RangeError("convergence tolerance must be positive");
    scen.validate();
    const int L = B.size();
    const auto loads = scen.row_loads(L);

    DeOutcome out{DeState::initial(L, scen.sigma2), false, 0};
    detail::check_dimensions(out.state, B, scen);
    if (!observe(out.state)) return out;
    while (out.iterations < max_iter) {
        DeState next = detail::step(out.state, B, scen.sigma2, loads, mmse);
        const double change = detail::max_change(next.sir, out.state.sir);
        out.state = std::move(next);
        ++out.iterations;
        if (!observe(out.state)) return out;
        if (change < tol) {
            out.converged = true;
            break;
        }
    }
    return out;
}

inline DeOutcome iterate_de(const BaseMatrix& B, const SystemScenario& scen, int max_iter, double tol,
                            const MmseFunction& mmse = MmseFunction::direct()) {
    return iterate_de(B, scen, max_iter, tol, mmse, [](const DeState&) { return true; });
}

struct IterationSummary {
    double avg_ber = 0.0;
    double min_ber = 0.0;
    int argmin_position = 0;
    double max_ber = 0.0;
};

struct DeSnapshot {
    std::vector<double> sir;
    std::vector<double> ber;
};

/// Per-iteration records of a DE run. Index k holds iteration k; index 0
/// is the zero start.
struct DeTrajectory {
    std::vector<DeSnapshot> snapshots;
    std::vector<IterationSummary> summaries;
    std::vector<std::vector<double>> sigma2_rows;
    bool converged = false;
    int iterations_run = 0;

    const DeSnapshot& final_snapshot() const { return snapshots.back(); }
    const IterationSummary& final_summary() const { return summaries.back(); }
};

inline IterationSummary summarize(const std::vector<double>& ber) {
    IterationSummary s;
    s.min_ber = std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (std::size_t m = 0; m < ber.size(); ++m) {
        sum += ber[m];
        if (ber[m] < s.min_ber) {
            s.min_ber = ber[m];
            s.argmin_position = static_cast<int>(m);
        }
        s.max_ber = std::max(s.max_ber, ber[m]);
    }
    s.avg_ber = sum / static_cast<double>(ber.size());
    return s;
}

inline std::vector<double> ber_vector(const std::vector<double>& sir) {
    std::vector<double> ber(sir.size());
    std::transform(sir.begin(), sir.end(), ber.begin(), ber_of);
    return ber;
}

/// Full DE run from the zero start with every iteration recorded.
inline DeTrajectory run_de(const BaseMatrix& B, const SystemScenario& scen, int max_iter = default_max_iter,
                           double tol = default_sir_tol, const MmseFunction& mmse = MmseFunction::direct()) {
    DeTrajectory traj;
    const auto outcome = iterate_de(B, scen, max_iter, tol, mmse, [&](const DeState& s) {
        auto ber = ber_vector(s.sir);
        traj.summaries.push_back(summarize(ber));
        traj.snapshots.push_back({s.sir, std::move(ber)});
        traj.sigma2_rows.push_back(s.sigma2_rows);
        return true;
    });
    traj.converged = outcome.converged;
    traj.iterations_run = outcome.iterations;
    return traj;
}

} // namespace sccdma
