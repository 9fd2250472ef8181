#pragma once

// Coupling graphs and base matrices for spatially coupled systems.
//
// A chain of L positions is coupled through a bipartite multigraph with L
// factor nodes (rows, symbol periods) and L variable nodes (columns, transmit
// positions). Regular coupling is the circulant band of half-width W; the
// small-world (SW) ensemble rewires edges of c equally spaced clusters to the
// other clusters, and the training phase is then picked by factor degree.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sccdma/errors.hpp"
#include "sccdma/random.hpp"

namespace sccdma {

enum class Side { factor, variable };

/// Parameters an SW instance was drawn with.
struct Provenance {
    double p = 0.0;
    int c = 1;
    std::uint64_t seed = 0;

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// Bipartite multigraph between L factor nodes and L variable nodes.
///
/// Every variable node has degree 2W+1; factor degrees may differ after
/// rewiring. Multiplicities are stored row-major (factor l, variable m).
class CouplingGraph {
public:
    CouplingGraph(int L, int W, std::vector<int> mult,
                  std::optional<Provenance> provenance = std::nullopt)
        : L_(L), W_(W), mult_(std::move(mult)), provenance_(provenance) {
        if (L_ <= 0 || W_ <= 0)
            throw DimensionError("coupling graph needs L > 0 and W > 0 (L=" + std::to_string(L_) +
                                 ", W=" + std::to_string(W_) + ")");
        if (mult_.size() != static_cast<std::size_t>(L_) * static_cast<std::size_t>(L_))
            throw DimensionError("multiplicity table must be L*L = " + std::to_string(L_ * L_) +
                                 " entries, got " + std::to_string(mult_.size()));
        for (int v : mult_)
            if (v < 0) throw IntegrityError("negative edge multiplicity");
        for (int m = 0; m < L_; ++m) {
            if (column_degree(m) != 2 * W_ + 1)
                throw IntegrityError("variable node " + std::to_string(m) + " has degree " +
                                     std::to_string(column_degree(m)) + ", expected 2W+1 = " +
                                     std::to_string(2 * W_ + 1));
        }
    }

    int size() const noexcept { return L_; }
    int width() const noexcept { return W_; }
    const std::optional<Provenance>& provenance() const noexcept { return provenance_; }

    int multiplicity(int l, int m) const { return mult_[index(l, m)]; }

    std::span<const int> row(int l) const {
        return {mult_.data() + static_cast<std::size_t>(l) * L_, static_cast<std::size_t>(L_)};
    }

    int row_degree(int l) const {
        auto r = row(l);
        return std::accumulate(r.begin(), r.end(), 0);
    }

    int column_degree(int m) const {
        int sum = 0;
        for (int l = 0; l < L_; ++l) sum += mult_[index(l, m)];
        return sum;
    }

    std::vector<int> factor_degrees() const {
        std::vector<int> d(L_);
        for (int l = 0; l < L_; ++l) d[l] = row_degree(l);
        return d;
    }

    long total_multiplicity() const {
        return std::accumulate(mult_.begin(), mult_.end(), 0L);
    }

    const std::vector<int>& table() const noexcept { return mult_; }

    friend bool operator==(const CouplingGraph&, const CouplingGraph&) = default;

private:
    std::size_t index(int l, int m) const {
        if (l < 0 || l >= L_ || m < 0 || m >= L_)
            throw IndexError("node index (" + std::to_string(l) + ", " + std::to_string(m) +
                             ") outside [0, " + std::to_string(L_) + ")");
        return static_cast<std::size_t>(l) * L_ + static_cast<std::size_t>(m);
    }

    int L_;
    int W_;
    std::vector<int> mult_;
    std::optional<Provenance> provenance_;
};

/// Factor nodes in the training phase T; everything else is propagation.
class TrainingAssignment {
public:
    TrainingAssignment() = default;

    /// Indices are sorted; duplicates or out-of-range entries are rejected.
    TrainingAssignment(int L, std::vector<int> indices) : L_(L), set_(std::move(indices)) {
        std::sort(set_.begin(), set_.end());
        for (int l : set_)
            if (l < 0 || l >= L_)
                throw IndexError("training index " + std::to_string(l) + " outside [0, " +
                                 std::to_string(L_) + ")");
        if (std::adjacent_find(set_.begin(), set_.end()) != set_.end())
            throw ConfigError("training set contains duplicate indices");
    }

    int chain_length() const noexcept { return L_; }
    int tau() const noexcept { return static_cast<int>(set_.size()); }
    const std::vector<int>& indices() const noexcept { return set_; }

    bool contains(int l) const { return std::binary_search(set_.begin(), set_.end(), l); }

    std::vector<int> propagation() const {
        std::vector<int> out;
        for (int l = 0; l < L_; ++l)
            if (!contains(l)) out.push_back(l);
        return out;
    }

    friend bool operator==(const TrainingAssignment&, const TrainingAssignment&) = default;

private:
    int L_ = 0;
    std::vector<int> set_;
};

/// Squared coupling weights b^2[l][m]; every column sums to one.
class BaseMatrix {
public:
    static constexpr double column_tolerance = 1e-12;

    BaseMatrix(int L, std::vector<double> bsq) : L_(L), bsq_(std::move(bsq)) {
        if (L_ <= 0) throw DimensionError("base matrix needs L > 0");
        if (bsq_.size() != static_cast<std::size_t>(L_) * static_cast<std::size_t>(L_))
            throw DimensionError("base matrix must have L*L entries");
        for (double v : bsq_)
            if (!(v >= 0.0 && v <= 1.0)) throw IntegrityError("base matrix entry outside [0, 1]");
        for (int m = 0; m < L_; ++m) {
            double s = 0.0;
            for (int l = 0; l < L_; ++l) s += at(l, m);
            if (std::abs(s - 1.0) > column_tolerance)
                throw IntegrityError("column " + std::to_string(m) + " of base matrix sums to " +
                                     std::to_string(s));
        }
    }

    /// The uncoupled system: a single position with b^2 = 1.
    static BaseMatrix uncoupled() { return BaseMatrix(1, {1.0}); }

    int size() const noexcept { return L_; }
    double at(int l, int m) const {
        return bsq_[static_cast<std::size_t>(l) * L_ + static_cast<std::size_t>(m)];
    }
    std::span<const double> row(int l) const {
        return {bsq_.data() + static_cast<std::size_t>(l) * L_, static_cast<std::size_t>(L_)};
    }
    const std::vector<double>& values() const noexcept { return bsq_; }

    double column_sum(int m) const {
        double s = 0.0;
        for (int l = 0; l < L_; ++l) s += at(l, m);
        return s;
    }

private:
    int L_;
    std::vector<double> bsq_;
};

/// Circular distance-based band: mult[l][m] = 1 iff (l - m) mod L is in
/// [0, W] or [L - W, L - 1].
inline CouplingGraph make_regular(int L, int W) {
    if (W < 1 || L < 2 * W + 2)
        throw DimensionError("regular coupling needs W >= 1 and L >= 2W+2 (L=" + std::to_string(L) +
                             ", W=" + std::to_string(W) + ")");
    std::vector<int> mult(static_cast<std::size_t>(L) * L, 0);
    for (int l = 0; l < L; ++l) {
        for (int m = 0; m < L; ++m) {
            const int d = ((l - m) % L + L) % L;
            if (d <= W || d >= L - W) mult[static_cast<std::size_t>(l) * L + m] = 1;
        }
    }
    return CouplingGraph(L, W, std::move(mult));
}

inline bool is_regular(const CouplingGraph& g) {
    if (g.size() < 2 * g.width() + 2) return false;
    return g.table() == make_regular(g.size(), g.width()).table();
}

/// Node `center` plus every same-side node at distance 2 in the regular
/// graph: the circular window center-2W .. center+2W, ascending.
inline std::vector<int> cluster_of(int center, Side /*side*/, int W, int L) {
    if (L <= 0 || W < 0) throw DimensionError("cluster_of needs L > 0 and W >= 0");
    if (center < 0 || center >= L)
        throw IndexError("cluster center " + std::to_string(center) + " outside [0, " +
                         std::to_string(L) + ")");
    std::vector<int> out;
    for (int j = -2 * W; j <= 2 * W; ++j) out.push_back(((center + j) % L + L) % L);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// Greedy degree-level training assignment.
///
/// Starting from the largest factor degree, whole degree levels are taken
/// while they fit in the remaining quota; the level that does not fit is
/// sampled uniformly without replacement. When `pool` is non-empty the loop
/// runs over the pool first and tops up from the remaining nodes only if the
/// pool is smaller than tau. Degree-0 factor nodes are never selected.
inline TrainingAssignment assign_training(const CouplingGraph& g, int tau, Rng& rng,
                                          std::span<const int> pool = {}) {
    const int L = g.size();
    if (tau < 1 || tau > L)
        throw RangeError("tau must be in [1, L] (tau=" + std::to_string(tau) +
                         ", L=" + std::to_string(L) + ")");
    const auto deg = g.factor_degrees();

    std::vector<char> in_pool(L, pool.empty() ? 1 : 0);
    for (int l : pool) {
        if (l < 0 || l >= L) throw IndexError("training pool index out of range");
        in_pool[l] = 1;
    }

    std::vector<int> chosen;
    int remaining = tau;

    auto greedy = [&](const std::vector<int>& candidates) {
        if (remaining == 0 || candidates.empty()) return;
        int d = 0;
        for (int l : candidates) d = std::max(d, deg[l]);
        for (; d >= 1 && remaining > 0; --d) {
            std::vector<int> level;
            for (int l : candidates)
                if (deg[l] == d) level.push_back(l);
            if (level.empty()) continue;
            if (static_cast<int>(level.size()) >= remaining) {
                // Partial Fisher-Yates: the first `remaining` slots are a uniform subset.
                for (int k = 0; k < remaining; ++k) {
                    const auto j = k + static_cast<int>(rng.below(level.size() - k));
                    std::swap(level[k], level[j]);
                }
                chosen.insert(chosen.end(), level.begin(), level.begin() + remaining);
                remaining = 0;
            } else {
                chosen.insert(chosen.end(), level.begin(), level.end());
                remaining -= static_cast<int>(level.size());
            }
        }
    };

    std::vector<int> first, rest;
    for (int l = 0; l < L; ++l) (in_pool[l] ? first : rest).push_back(l);
    greedy(first);
    greedy(rest);

    if (remaining > 0)
        throw RangeError("tau=" + std::to_string(tau) + " exceeds the number of factor nodes with nonzero degree");
    return TrainingAssignment(L, std::move(chosen));
}

/// Union of the factor-side clusters centered at iL/c, i = 0..c-1.
inline std::vector<int> cluster_union(int L, int W, int c) {
    std::vector<int> out;
    for (int i = 0; i < c; ++i) {
        auto cl = cluster_of(i * (L / c), Side::factor, W, L);
        out.insert(out.end(), cl.begin(), cl.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// Validates (L, W, p, c) for SW rewiring.
inline void check_sw_parameters(int L, int W, double p, int c) {
    if (!(p >= 0.0 && p <= 1.0)) throw RangeError("rewiring probability p must lie in [0, 1]");
    if (c < 1) throw ConfigError("cluster count c must be positive");
    if (L % c != 0)
        throw ConfigError("L=" + std::to_string(L) + " is not divisible by c=" + std::to_string(c));
    if (p > 0.0 && c < 2) throw ConfigError("rewiring with p > 0 needs at least two clusters");
    if (c >= 2 && L / c <= 4 * W)
        throw ConfigError("clusters overlap: L/c = " + std::to_string(L / c) +
                          " must exceed 4W = " + std::to_string(4 * W));
}

/// Small-world rewiring of a regular graph followed by training assignment.
///
/// For cluster i = 0..c-1, every edge of every variable node in the i-th
/// cluster (ascending variable, then ascending factor, snapshot per cluster
/// pass) is moved with probability p to a factor node drawn uniformly from
/// the union of the other clusters. Parallel edges accumulate. Training
/// nodes are then assigned by degree with the cluster factor nodes as pool.
inline std::pair<CouplingGraph, TrainingAssignment>
sw_rewire(const CouplingGraph& g, double p, int c, int tau, Rng& rng) {
    const int L = g.size();
    const int W = g.width();
    check_sw_parameters(L, W, p, c);
    if (!is_regular(g)) throw ConfigError("sw_rewire expects the regular coupling graph");
    if (tau < 1 || tau > L) throw RangeError("tau must be in [1, L]");

    std::vector<int> mult = g.table();
    auto at = [&](int l, int m) -> int& { return mult[static_cast<std::size_t>(l) * L + m]; };

    for (int i = 0; i < c; ++i) {
        std::vector<int> targets;
        for (int j = 0; j < c; ++j) {
            if (j == i) continue;
            auto cl = cluster_of(j * (L / c), Side::factor, W, L);
            targets.insert(targets.end(), cl.begin(), cl.end());
        }
        std::sort(targets.begin(), targets.end());
        if (targets.empty()) continue;

        const auto variables = cluster_of(i * (L / c), Side::variable, W, L);
        std::vector<std::vector<int>> snapshot;
        for (int m : variables) {
            std::vector<int> edges;
            for (int l = 0; l < L; ++l)
                for (int k = 0; k < at(l, m); ++k) edges.push_back(l);
            snapshot.push_back(std::move(edges));
        }
        for (std::size_t v = 0; v < variables.size(); ++v) {
            const int m = variables[v];
            for (int l : snapshot[v]) {
                if (!rng.bernoulli(p)) continue;
                --at(l, m);
                ++at(targets[rng.below(targets.size())], m);
            }
        }
    }

    CouplingGraph rewired(L, W, std::move(mult), Provenance{p, c, rng.seed()});
    const auto pool = cluster_union(L, W, c);
    auto training = assign_training(rewired, tau, rng, pool);
    return {std::move(rewired), std::move(training)};
}

inline BaseMatrix to_base_matrix(const CouplingGraph& g) {
    const int L = g.size();
    const int degree = 2 * g.width() + 1;
    for (int m = 0; m < L; ++m)
        if (g.column_degree(m) != degree)
            throw IntegrityError("column " + std::to_string(m) + " does not sum to 2W+1");
    std::vector<double> bsq(g.table().size());
    for (std::size_t k = 0; k < bsq.size(); ++k)
        bsq[k] = static_cast<double>(g.table()[k]) / degree;
    return BaseMatrix(L, std::move(bsq));
}

/// Harmonic mix of the training and propagation loads weighted by tau/L.
inline double average_load(double alpha_tr, double alpha, int tau, int L) {
    if (!(alpha_tr > 0.0) || !(alpha > 0.0)) throw RangeError("loads must be positive");
    if (L <= 0 || tau < 0 || tau > L) throw RangeError("need 0 <= tau <= L and L > 0");
    const double frac = static_cast<double>(tau) / L;
    return 1.0 / (frac / alpha_tr + (1.0 - frac) / alpha);
}

} // namespace sccdma
