#pragma once

// Instance search over the (L, W, p, c, tau)-SW ensemble: draw instances
// from index-derived seeds, score each by the number of DE iterations until
// the average BER reaches a target, and optionally estimate BP thresholds
// for the best few.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "sccdma/coupling.hpp"
#include "sccdma/de.hpp"
#include "sccdma/graph_io.hpp"
#include "sccdma/random.hpp"
#include "sccdma/threshold.hpp"

namespace sccdma {

inline constexpr double default_target_ber = 2e-3;
inline constexpr int default_finalists = 10;

struct EnsembleSpec {
    int L = 64;
    int W = 2;
    double p = 0.1;
    int c = 2;
    int tau = 14;
    std::uint64_t master_seed = 1;
    int n_samples = 200;

    void validate() const {
        if (n_samples < 1) throw RangeError("n_samples must be at least 1");
        if (W < 1 || L < 2 * W + 2) throw DimensionError("ensemble needs W >= 1 and L >= 2W+2");
        check_sw_parameters(L, W, p, c);
        if (tau < 1 || tau > L) throw RangeError("tau must be in [1, L]");
    }
};

/// Scenario shared by all instances of a search (the training set comes
/// from each instance).
struct ScoringScenario {
    double sigma2 = 0.1;
    double alpha_tr = 1.45;
    double alpha = 1.98;
    double target_ber = default_target_ber;
    int max_iter = default_max_iter;
    double sir_tol = default_sir_tol;
    MmseFunction mmse = MmseFunction::direct();
};

struct InstanceScore {
    int index = -1;
    std::uint64_t instance_seed = 0;
    std::optional<int> iterations_to_target; // empty = not reached
    double final_max_ber = 0.5;
    bool converged = false;
    std::optional<ThresholdResult> threshold;
    std::string error;
};

inline std::uint64_t instance_seed(const EnsembleSpec& spec, int index) {
    return derive_seed(spec.master_seed, static_cast<std::uint64_t>(index));
}

/// Deterministic instance `index` of the ensemble.
inline GraphFile sample_instance(const EnsembleSpec& spec, int index) {
    spec.validate();
    if (index < 0 || index >= spec.n_samples)
        throw IndexError("instance index " + std::to_string(index) + " outside [0, " +
                         std::to_string(spec.n_samples) + ")");
    Rng rng(instance_seed(spec, index));
    auto [g, t] = sw_rewire(make_regular(spec.L, spec.W), spec.p, spec.c, spec.tau, rng);
    return {std::move(g), std::move(t)};
}

/// First iteration (0 = the zero start) at which the average BER is at
/// most the target, plus the final worst-position BER.
inline InstanceScore score_instance(const CouplingGraph& g, const TrainingAssignment& t,
                                    const ScoringScenario& sc) {
    const auto B = to_base_matrix(g);
    const SystemScenario scen{sc.sigma2, sc.alpha_tr, sc.alpha, t};
    InstanceScore score;
    const auto out = iterate_de(B, scen, sc.max_iter, sc.sir_tol, sc.mmse, [&](const DeState& s) {
        if (!score.iterations_to_target) {
            double sum = 0.0;
            for (double x : s.sir) sum += ber_of(x);
            if (sum / static_cast<double>(s.sir.size()) <= sc.target_ber) score.iterations_to_target = s.iteration;
        }
        return true;
    });
    double worst = 0.0;
    for (double x : out.state.sir) worst = std::max(worst, ber_of(x));
    score.final_max_ber = worst;
    score.converged = out.converged;
    return score;
}

/// Total order used for ranking: reached before not reached, then fewer
/// iterations, lower final max BER, lower seed.
inline bool ranks_before(const InstanceScore& a, const InstanceScore& b) {
    auto key = [](const InstanceScore& s) {
        return std::make_tuple(s.error.empty() ? 0 : 1, s.iterations_to_target ? 0 : 1,
                               s.iterations_to_target.value_or(0), s.final_max_ber, s.instance_seed);
    };
    return key(a) < key(b);
}

struct SearchOptions {
    bool with_thresholds = false;
    int finalists = default_finalists;
    int workers = 1;
    // Bracket and tolerances for finalist thresholds.
    double alpha_lo = 1.5;
    double alpha_hi = 2.2;
    double alpha_tol = default_alpha_tol;
    double success_ber = default_success_ber;
    int threshold_max_iter = default_threshold_max_iter;
};

struct SearchReport {
    EnsembleSpec spec;
    ScoringScenario scenario;
    bool with_thresholds = false;
    std::vector<InstanceScore> ranked;
    GraphFile best;
};

namespace detail {

// Runs job(k) for k in [0, n) on up to `workers` threads. Results must be
// written to slot k only, so the outcome does not depend on scheduling.
template <class Job>
void parallel_for(int n, int workers, Job&& job) {
    workers = std::max(1, std::min(workers, n));
    if (workers == 1) {
        for (int k = 0; k < n; ++k) job(k);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int k = next.fetch_add(1); k < n; k = next.fetch_add(1)) job(k);
        });
}

} // namespace detail

inline ThresholdQuery finalist_query(const GraphFile& inst, const ScoringScenario& sc, const SearchOptions& opt) {
    ThresholdQuery q;
    q.B = to_base_matrix(inst.graph);
    q.sigma2 = sc.sigma2;
    q.alpha_tr = sc.alpha_tr;
    q.training = inst.training;
    q.alpha_lo = opt.alpha_lo;
    q.alpha_hi = opt.alpha_hi;
    q.alpha_tol = opt.alpha_tol;
    q.success_ber = opt.success_ber;
    q.max_iter = opt.threshold_max_iter;
    q.sir_tol = sc.sir_tol;
    q.mmse = sc.mmse;
    return q;
}

inline SearchReport ensemble_search(const EnsembleSpec& spec, const ScoringScenario& sc,
                                    const SearchOptions& opt = {}) {
    spec.validate();
    std::vector<InstanceScore> scores(spec.n_samples);
    detail::parallel_for(spec.n_samples, opt.workers, [&](int k) {
        InstanceScore s;
        try {
            const auto inst = sample_instance(spec, k);
            s = score_instance(inst.graph, inst.training, sc);
        } catch (const std::exception& e) {
            s.error = e.what();
        }
        s.index = k;
        s.instance_seed = instance_seed(spec, k);
        scores[k] = std::move(s);
    });
    std::sort(scores.begin(), scores.end(), ranks_before);

    if (opt.with_thresholds) {
        const int n = std::min<int>(opt.finalists, static_cast<int>(scores.size()));
        detail::parallel_for(n, opt.workers, [&](int k) {
            auto& s = scores[k];
            if (!s.error.empty()) return;
            try {
                s.threshold = bp_threshold(finalist_query(sample_instance(spec, s.index), sc, opt));
            } catch (const std::exception& e) {
                s.error = std::string("threshold: ") + e.what();
            }
        });
    }

    SearchReport report{spec, sc, opt.with_thresholds, std::move(scores), sample_instance(spec, 0)};
    report.best = sample_instance(spec, report.ranked.front().index);
    return report;
}

} // namespace sccdma
