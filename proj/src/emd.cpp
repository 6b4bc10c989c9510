#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "sgf/metrics.hpp"

namespace sgf::metrics {

// Exact transportation problem via successive shortest paths with Johnson
// potentials. Sources 0..m-1, sinks m..m+n-1; the graph is the complete
// bipartite forward arc set plus reverse arcs where flow is positive.
double emd_transport(const std::vector<double>& supply, const std::vector<double>& demand,
                     const std::vector<double>& cost, int m, int n) {
  if (m <= 0 || n <= 0) throw std::invalid_argument("emd_transport: empty instance");
  if (supply.size() != static_cast<size_t>(m) || demand.size() != static_cast<size_t>(n) ||
      cost.size() != static_cast<size_t>(m) * n)
    throw std::invalid_argument("emd_transport: size mismatch");

  double total_supply = 0.0, total_demand = 0.0;
  for (double v : supply) {
    if (v < 0.0) throw std::invalid_argument("emd_transport: negative supply");
    total_supply += v;
  }
  for (double v : demand) {
    if (v < 0.0) throw std::invalid_argument("emd_transport: negative demand");
    total_demand += v;
  }
  if (std::abs(total_supply - total_demand) > 1e-9 * std::max(1.0, total_supply))
    throw std::invalid_argument("emd_transport: unbalanced totals");

  constexpr double kEps = 1e-15;
  constexpr double kResidualStop = 1e-12;
  const double inf = std::numeric_limits<double>::infinity();
  const int V = m + n;

  std::vector<double> flow(static_cast<size_t>(m) * n, 0.0);
  std::vector<double> rsup = supply;
  std::vector<double> rdem = demand;
  std::vector<double> pot(static_cast<size_t>(V), 0.0);

  std::vector<double> dist(static_cast<size_t>(V));
  std::vector<int> prev(static_cast<size_t>(V));
  std::vector<char> done(static_cast<size_t>(V));

  double remaining = total_supply;
  const long max_iters = 64L * V * std::max(m, n) + 1024;
  for (long iter = 0; iter < max_iters && remaining > kResidualStop; ++iter) {
    std::fill(dist.begin(), dist.end(), inf);
    std::fill(prev.begin(), prev.end(), -1);
    std::fill(done.begin(), done.end(), 0);
    for (int i = 0; i < m; ++i)
      if (rsup[static_cast<size_t>(i)] > kEps) dist[static_cast<size_t>(i)] = 0.0;

    // Dense Dijkstra: the graph is complete bipartite, so a heap buys nothing.
    for (int round = 0; round < V; ++round) {
      int u = -1;
      double best = inf;
      for (int v = 0; v < V; ++v)
        if (!done[static_cast<size_t>(v)] && dist[static_cast<size_t>(v)] < best) {
          best = dist[static_cast<size_t>(v)];
          u = v;
        }
      if (u < 0) break;
      done[static_cast<size_t>(u)] = 1;
      if (u < m) {
        const double du = dist[static_cast<size_t>(u)];
        const double* crow = cost.data() + static_cast<size_t>(u) * n;
        for (int j = 0; j < n; ++j) {
          const int v = m + j;
          if (done[static_cast<size_t>(v)]) continue;
          const double rc = crow[j] + pot[static_cast<size_t>(u)] - pot[static_cast<size_t>(v)];
          const double nd = du + rc;
          if (nd < dist[static_cast<size_t>(v)]) {
            dist[static_cast<size_t>(v)] = nd;
            prev[static_cast<size_t>(v)] = u;
          }
        }
      } else {
        const int j = u - m;
        const double du = dist[static_cast<size_t>(u)];
        for (int i = 0; i < m; ++i) {
          if (done[static_cast<size_t>(i)]) continue;
          if (flow[static_cast<size_t>(i) * n + j] <= kEps) continue;
          const double rc =
              -cost[static_cast<size_t>(i) * n + j] + pot[static_cast<size_t>(u)] -
              pot[static_cast<size_t>(i)];
          const double nd = du + rc;
          if (nd < dist[static_cast<size_t>(i)]) {
            dist[static_cast<size_t>(i)] = nd;
            prev[static_cast<size_t>(i)] = u;
          }
        }
      }
    }

    int target = -1;
    double best = inf;
    for (int j = 0; j < n; ++j)
      if (rdem[static_cast<size_t>(j)] > kEps && dist[static_cast<size_t>(m + j)] < best) {
        best = dist[static_cast<size_t>(m + j)];
        target = m + j;
      }
    if (target < 0) throw std::runtime_error("emd_transport: no augmenting path");

    // Walk back to the root source, collecting the bottleneck.
    double amount = rdem[static_cast<size_t>(target - m)];
    int v = target;
    while (prev[static_cast<size_t>(v)] >= 0) {
      const int u = prev[static_cast<size_t>(v)];
      if (u < m)
        ;  // forward arc: unbounded
      else
        amount = std::min(amount, flow[static_cast<size_t>(v) * n + (u - m)]);
      v = u;
    }
    amount = std::min(amount, rsup[static_cast<size_t>(v)]);
    const int root = v;

    v = target;
    while (prev[static_cast<size_t>(v)] >= 0) {
      const int u = prev[static_cast<size_t>(v)];
      if (u < m)
        flow[static_cast<size_t>(u) * n + (v - m)] += amount;
      else
        flow[static_cast<size_t>(v) * n + (u - m)] -= amount;
      v = u;
    }
    rsup[static_cast<size_t>(root)] -= amount;
    rdem[static_cast<size_t>(target - m)] -= amount;
    remaining -= amount;

    const double dt = dist[static_cast<size_t>(target)];
    for (int w = 0; w < V; ++w)
      pot[static_cast<size_t>(w)] +=
          std::min(dist[static_cast<size_t>(w)], dt);
  }
  if (remaining > 1e-9)
    throw std::runtime_error("emd_transport: failed to ship all mass");

  double total = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      total += flow[static_cast<size_t>(i) * n + j] * cost[static_cast<size_t>(i) * n + j];
  return total;
}

}  // namespace sgf::metrics
