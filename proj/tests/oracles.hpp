#pragma once

// Independent reference computations used only by the tests. None of these
// call into the code paths they check.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <queue>
#include <set>
#include <vector>

#include "sccdma/coupling.hpp"
#include "sccdma/mmse.hpp"
#include "sccdma/random.hpp"

namespace oracle {

// Regular band built from the variable side: variable m touches factors
// m-W .. m+W (mod L).
inline std::vector<std::vector<int>> variable_neighbours(int L, int W) {
    std::vector<std::vector<int>> adj(L);
    for (int m = 0; m < L; ++m)
        for (int j = -W; j <= W; ++j) adj[m].push_back(((m + j) % L + L) % L);
    return adj;
}

// Same-side nodes within bipartite distance 2 of `center` by breadth-first
// search over the regular graph (2L nodes: factors 0..L-1, variables L..2L-1).
inline std::set<int> bfs_cluster(int center, bool variable_side, int L, int W) {
    const auto vn = variable_neighbours(L, W);
    std::vector<std::vector<int>> adj(2 * L);
    for (int m = 0; m < L; ++m)
        for (int l : vn[m]) {
            adj[L + m].push_back(l);
            adj[l].push_back(L + m);
        }
    const int start = variable_side ? L + center : center;
    std::vector<int> dist(2 * L, -1);
    std::queue<int> q;
    dist[start] = 0;
    q.push(start);
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (int v : adj[u])
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                q.push(v);
            }
    }
    std::set<int> out;
    for (int v = 0; v < 2 * L; ++v) {
        const bool same_side = variable_side ? v >= L : v < L;
        if (same_side && dist[v] >= 0 && dist[v] <= 2) out.insert(variable_side ? v - L : v);
    }
    return out;
}

// Gaussian upper tail by composite Simpson in long double over [x, 40].
inline double gaussian_tail(double x, int panels = 200000) {
    const long double a = x, b = 40.0L;
    if (a >= b) return 0.0;
    const long double h = (b - a) / panels;
    auto phi = [](long double t) { return std::exp(-t * t / 2) / std::sqrt(2 * std::numbers::pi_v<long double>); };
    long double s = phi(a) + phi(b);
    for (int k = 1; k < panels; ++k) s += (k % 2 ? 4 : 2) * phi(a + k * h);
    return static_cast<double>(s * h / 3);
}

// MMSE by trapezoid rule on the z axis (z in [-12, 12]), 1 - E[tanh].
inline double mmse_trapezoid(double x, int n = 24000) {
    const double lo = -12.0, hi = 12.0, h = (hi - lo) / n;
    double acc = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double z = lo + k * h;
        const double w = (k == 0 || k == n) ? 0.5 : 1.0;
        acc += w * std::tanh(x + std::sqrt(x) * z) * std::exp(-z * z / 2);
    }
    return 1.0 - acc * h / std::sqrt(2 * std::numbers::pi);
}

// Literal re-evaluation of one DE step from a dense b^2 table.
inline std::vector<double> de_step_naive(const std::vector<std::vector<double>>& b2, const std::vector<double>& sir,
                                         double sigma2, const std::vector<double>& alpha_rows) {
    const std::size_t L = b2.size();
    std::vector<double> out(L, 0.0);
    for (std::size_t m = 0; m < L; ++m) {
        for (std::size_t l = 0; l < L; ++l) {
            double interference = 0.0;
            for (std::size_t k = 0; k < L; ++k) interference += b2[l][k] * sccdma::mmse_bpsk(sir[k]);
            out[m] += b2[l][m] / (sigma2 + alpha_rows[l] * interference);
        }
    }
    return out;
}

// Random multigraph with every column summing to 2W+1.
inline sccdma::CouplingGraph random_graph(int L, int W, sccdma::Rng& rng) {
    std::vector<int> mult(static_cast<std::size_t>(L) * L, 0);
    for (int m = 0; m < L; ++m)
        for (int k = 0; k < 2 * W + 1; ++k) ++mult[rng.below(L) * L + m];
    return sccdma::CouplingGraph(L, W, std::move(mult));
}

inline std::vector<int> random_permutation(int n, sccdma::Rng& rng) {
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = i;
    for (int i = n - 1; i > 0; --i) std::swap(p[i], p[rng.below(i + 1)]);
    return p;
}

} // namespace oracle
