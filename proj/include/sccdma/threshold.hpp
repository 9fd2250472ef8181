#pragma once

// BP threshold estimation by bisection over the propagation load.
//
// A load counts as a success when DE started from zero converges and every
// position ends with BER <= success_ber. DE from zero is monotone and stops
// at the smallest fixed point, so success means that point is the good one.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "sccdma/coupling.hpp"
#include "sccdma/de.hpp"
#include "sccdma/errors.hpp"
#include "sccdma/mmse.hpp"

namespace sccdma {

inline constexpr double default_success_ber = 1e-2;
inline constexpr double default_alpha_tol = 1e-4;
inline constexpr int default_threshold_max_iter = 10000;

struct ThresholdQuery {
    BaseMatrix B = BaseMatrix::uncoupled();
    double sigma2 = 0.1;
    double alpha_tr = 1.45;
    TrainingAssignment training;
    double alpha_lo = 1.0;
    double alpha_hi = 2.5;
    double alpha_tol = default_alpha_tol;
    double success_ber = default_success_ber;
    int max_iter = default_threshold_max_iter;
    double sir_tol = default_sir_tol;
    MmseFunction mmse = MmseFunction::direct();

    SystemScenario scenario(double alpha) const { return {sigma2, alpha_tr, alpha, training}; }

    void validate() const {
        scenario(1.0).validate();
        if (!(alpha_lo > 0.0) || !(alpha_lo < alpha_hi))
            throw BracketError("threshold bracket needs 0 < alpha_lo < alpha_hi (got " +
                                   std::to_string(alpha_lo) + ", " + std::to_string(alpha_hi) + ")",
                               false, false);
        if (!(alpha_tol > 0.0)) throw RangeError("alpha_tol must be positive");
        if (!(success_ber > 0.0 && success_ber <= 0.5)) throw RangeError("success_ber must lie in (0, 0.5]");
        // Even a perfectly decoupled user cannot beat Q(sqrt(1/sigma2)).
        if (qfunc(std::sqrt(1.0 / sigma2)) >= success_ber)
            throw ConfigError("success_ber is below the single-user bound at this SNR");
    }
};

struct Evaluation {
    double alpha = 0.0;
    bool converged = false;
    double max_ber = 0.0;
    int iterations = 0;
    bool success = false;
};

inline Evaluation evaluate_load(double alpha, const ThresholdQuery& q) {
    if (!(alpha > 0.0)) throw RangeError("load must be positive");
    const auto out = iterate_de(q.B, q.scenario(alpha), q.max_iter, q.sir_tol, q.mmse);
    double worst = 0.0;
    for (double s : out.state.sir) worst = std::max(worst, ber_of(s));
    return {alpha, out.converged, worst, out.iterations, out.converged && worst <= q.success_ber};
}

inline bool de_success(double alpha, const ThresholdQuery& q) { return evaluate_load(alpha, q).success; }

struct ThresholdResult {
    double alpha_bp = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    bool lo_success = true;
    bool hi_success = false;
    int de_evaluations = 0;
    double avg_load_at_threshold = 0.0;
    std::vector<Evaluation> log;
};

/// Bisection on [alpha_lo, alpha_hi] until the bracket is no wider than
/// alpha_tol. The estimate is the last successful load.
inline ThresholdResult bp_threshold(const ThresholdQuery& q) {
    q.validate();
    ThresholdResult r;
    auto eval = [&](double a) {
        r.log.push_back(evaluate_load(a, q));
        return r.log.back().success;
    };

    const bool lo_ok = eval(q.alpha_lo);
    const bool hi_ok = eval(q.alpha_hi);
    if (!lo_ok || hi_ok) {
        std::ostringstream os;
        os << "invalid threshold bracket: alpha_lo=" << q.alpha_lo << " " << (lo_ok ? "succeeds" : "fails")
           << ", alpha_hi=" << q.alpha_hi << " " << (hi_ok ? "succeeds" : "fails")
           << " (need success at lo and failure at hi)";
        throw BracketError(os.str(), lo_ok, hi_ok);
    }

    double lo = q.alpha_lo, hi = q.alpha_hi;
    while (hi - lo > q.alpha_tol) {
        const double mid = 0.5 * (lo + hi);
        (eval(mid) ? lo : hi) = mid;
    }

    // Bisection assumes success is monotone in the load; a success recorded
    // above a failure means that assumption broke.
    double lowest_failure = std::numeric_limits<double>::infinity();
    for (const auto& e : r.log)
        if (!e.success) lowest_failure = std::min(lowest_failure, e.alpha);
    for (const auto& e : r.log)
        if (e.success && e.alpha > lowest_failure) {
            std::ostringstream os;
            os << "non-monotone DE success: load " << e.alpha << " succeeds but " << lowest_failure << " fails";
            throw Error(os.str());
        }

    r.alpha_bp = lo;
    r.bracket_lo = lo;
    r.bracket_hi = hi;
    r.de_evaluations = static_cast<int>(r.log.size());
    r.avg_load_at_threshold = average_load(q.alpha_tr, lo, q.training.tau(), q.B.size());
    return r;
}

/// Roots of f(x) = x (sigma2 + alpha mmse(x)) - 1 on (0, 1/sigma2], found
/// by a sign-change scan over grid_size cells and bisection to 1e-10.
/// The uncoupled DE has a unique fixed point iff exactly one root exists.
inline std::vector<double> scalar_fixed_points(double alpha, double sigma2, int grid_size = 2000,
                                               const MmseFunction& mmse = MmseFunction::direct()) {
    if (grid_size < 100) throw RangeError("scalar_fixed_points needs grid_size >= 100");
    if (!(alpha > 0.0) || !(sigma2 > 0.0)) throw RangeError("alpha and sigma2 must be positive");
    auto f = [&](double x) { return x * (sigma2 + alpha * mmse(x)) - 1.0; };

    const double top = 1.0 / sigma2;
    std::vector<double> roots;
    double x0 = 0.0, f0 = f(0.0);
    for (int k = 1; k <= grid_size; ++k) {
        const double x1 = top * k / grid_size;
        const double f1 = f(x1);
        if (f1 == 0.0) {
            roots.push_back(x1);
        } else if (f0 != 0.0 && (f0 < 0.0) != (f1 < 0.0)) {
            double a = x0, b = x1, fa = f0;
            while (b - a > 1e-10) {
                const double mid = 0.5 * (a + b);
                const double fm = f(mid);
                if ((fm < 0.0) == (fa < 0.0)) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        x0 = x1;
        f0 = f1;
    }
    return roots;
}

} // namespace sccdma
