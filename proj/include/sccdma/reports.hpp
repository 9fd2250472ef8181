#pragma once

// CSV outputs. Reals are written with 17 significant digits so reruns can
// be diffed byte for byte.

#include <cstdio>
#include <string>

#include "sccdma/de.hpp"
#include "sccdma/search.hpp"
#include "sccdma/threshold.hpp"

namespace sccdma {

inline std::string fmt_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// `iteration,position,sir,ber`, one row per (iteration, position).
inline std::string trajectory_csv(const DeTrajectory& traj) {
    std::string out = "iteration,position,sir,ber\n";
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
        const auto& snap = traj.snapshots[i];
        for (std::size_t m = 0; m < snap.sir.size(); ++m) {
            out += std::to_string(i) + ',' + std::to_string(m) + ',' + fmt_real(snap.sir[m]) + ',' +
                   fmt_real(snap.ber[m]) + '\n';
        }
    }
    return out;
}

/// `iteration,avg_ber,min_ber,argmin_position`.
inline std::string summary_csv(const DeTrajectory& traj) {
    std::string out = "iteration,avg_ber,min_ber,argmin_position\n";
    for (std::size_t i = 0; i < traj.summaries.size(); ++i) {
        const auto& s = traj.summaries[i];
        out += std::to_string(i) + ',' + fmt_real(s.avg_ber) + ',' + fmt_real(s.min_ber) + ',' +
               std::to_string(s.argmin_position) + '\n';
    }
    return out;
}

inline std::string threshold_report_csv(const ThresholdResult& r, const ThresholdQuery& q) {
    return "alpha_bp,bracket_lo,bracket_hi,avg_load,evaluations,success_ber,alpha_tol\n" + fmt_real(r.alpha_bp) +
           ',' + fmt_real(r.bracket_lo) + ',' + fmt_real(r.bracket_hi) + ',' + fmt_real(r.avg_load_at_threshold) +
           ',' + std::to_string(r.de_evaluations) + ',' + fmt_real(q.success_ber) + ',' + fmt_real(q.alpha_tol) +
           '\n';
}

inline std::string threshold_log_csv(const ThresholdResult& r) {
    std::string out = "alpha,converged,max_ber,iterations\n";
    for (const auto& e : r.log)
        out += fmt_real(e.alpha) + ',' + (e.converged ? "1" : "0") + ',' + fmt_real(e.max_ber) + ',' +
               std::to_string(e.iterations) + '\n';
    return out;
}

inline constexpr const char* not_reached_token = "NOT_REACHED";

/// Ranked rows `index,instance_seed,iterations_to_target,final_max_ber`,
/// plus `alpha_bp` when thresholds were computed (empty for non-finalists).
inline std::string search_report_csv(const SearchReport& rep) {
    std::string out = "index,instance_seed,iterations_to_target,final_max_ber";
    out += rep.with_thresholds ? ",alpha_bp\n" : "\n";
    for (const auto& s : rep.ranked) {
        out += std::to_string(s.index) + ',' + std::to_string(s.instance_seed) + ',' +
               (s.iterations_to_target ? std::to_string(*s.iterations_to_target) : not_reached_token) + ',' +
               fmt_real(s.final_max_ber);
        if (rep.with_thresholds) out += ',' + (s.threshold ? fmt_real(s.threshold->alpha_bp) : std::string());
        out += '\n';
    }
    return out;
}

} // namespace sccdma
