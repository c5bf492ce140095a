#ifndef ADMIPC_LOUVAIN_HPP
#define ADMIPC_LOUVAIN_HPP

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "admipc/netgen.hpp"
#include "admipc/rng.hpp"

namespace admipc {

/// Undirected simple graph. Unobserved pairs of an ObservedGraph count as non-edges.
class SimpleGraph {
 public:
  SimpleGraph(Index n, std::vector<IndexPair> edges) : n_(n), adj_(static_cast<std::size_t>(n)) {
    if (n < 1) throw std::invalid_argument("SimpleGraph: n must be >= 1");
    for (auto& [i, j] : edges) {
      if (i > j) std::swap(i, j);
      if (i == j) throw std::invalid_argument("SimpleGraph: self-loops are not allowed");
      if (i < 0 || j >= n) throw std::invalid_argument("SimpleGraph: node index out of range");
    }
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
      throw std::invalid_argument("SimpleGraph: duplicate edge");
    for (const auto& [i, j] : edges) {
      adj_[i].push_back(j);
      adj_[j].push_back(i);
    }
    for (auto& a : adj_) std::sort(a.begin(), a.end());
    edges_ = std::move(edges);
  }

  static SimpleGraph fromObserved(const ObservedGraph& g) {
    std::vector<IndexPair> edges;
    for (std::size_t k = 0; k < g.pairs().size(); ++k)
      if (g.bits()[k]) edges.push_back(g.pairs()[k]);
    return SimpleGraph(g.n(), std::move(edges));
  }

  Index n() const noexcept { return n_; }
  std::size_t edgeCount() const noexcept { return edges_.size(); }
  const std::vector<IndexPair>& edges() const noexcept { return edges_; }
  const std::vector<Index>& neighbors(Index i) const { return adj_[static_cast<std::size_t>(i)]; }
  Index degree(Index i) const { return static_cast<Index>(neighbors(i).size()); }

 private:
  Index n_;
  std::vector<std::vector<Index>> adj_;
  std::vector<IndexPair> edges_;
};

/// Q = sum_c [ e_c / m - (d_c / 2m)^2 ].
inline double modularity(const SimpleGraph& g, const Partition& p) {
  if (p.n() != g.n()) throw std::invalid_argument("modularity: partition size does not match graph");
  const auto m = static_cast<double>(g.edgeCount());
  if (m == 0) throw std::invalid_argument("modularity: graph has no edges");
  std::vector<double> intra(static_cast<std::size_t>(p.r()), 0.0), deg(static_cast<std::size_t>(p.r()), 0.0);
  for (const auto& [i, j] : g.edges())
    if (p[i] == p[j]) intra[p[i]] += 1.0;
  for (Index i = 0; i < g.n(); ++i) deg[p[i]] += static_cast<double>(g.degree(i));
  double q = 0.0;
  for (int c = 0; c < p.r(); ++c) q += intra[c] / m - (deg[c] / (2 * m)) * (deg[c] / (2 * m));
  return q;
}

namespace louvain_detail {

/// Symmetric weighted graph; w(a, a) holds twice the internal edge weight so
/// that strengths and 2m are plain row sums.
struct WeightedGraph {
  std::vector<std::vector<std::pair<Index, double>>> adj;  // includes (a, w(a, a)) when nonzero
  std::vector<double> strength;
  double twoM = 0.0;

  Index n() const { return static_cast<Index>(adj.size()); }

  static WeightedGraph fromSimple(const SimpleGraph& g) {
    WeightedGraph w;
    w.adj.resize(static_cast<std::size_t>(g.n()));
    w.strength.assign(static_cast<std::size_t>(g.n()), 0.0);
    for (Index i = 0; i < g.n(); ++i) {
      for (Index j : g.neighbors(i)) w.adj[i].emplace_back(j, 1.0);
      w.strength[i] = static_cast<double>(g.degree(i));
    }
    w.twoM = 2.0 * static_cast<double>(g.edgeCount());
    return w;
  }
};

/// Community graph: node c carries the summed weights of its members.
inline WeightedGraph aggregate(const WeightedGraph& g, const std::vector<int>& community, int numCommunities) {
  WeightedGraph out;
  out.adj.resize(static_cast<std::size_t>(numCommunities));
  out.strength.assign(static_cast<std::size_t>(numCommunities), 0.0);
  out.twoM = g.twoM;
  std::vector<double> acc(static_cast<std::size_t>(numCommunities), 0.0);
  std::vector<Index> touched;
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(numCommunities));
  for (Index a = 0; a < g.n(); ++a) members[community[a]].push_back(a);
  for (int c = 0; c < numCommunities; ++c) {
    touched.clear();
    for (Index a : members[c])
      for (const auto& [b, w] : g.adj[a]) {
        const int cb = community[b];
        if (acc[cb] == 0.0) touched.push_back(cb);
        acc[cb] += w;
      }
    std::sort(touched.begin(), touched.end());
    for (Index cb : touched) {
      out.adj[c].emplace_back(cb, acc[cb]);
      out.strength[c] += acc[cb];
      acc[cb] = 0.0;
    }
  }
  return out;
}

inline double modularity(const WeightedGraph& g, const std::vector<int>& community, int numCommunities) {
  std::vector<double> in(static_cast<std::size_t>(numCommunities), 0.0), tot(static_cast<std::size_t>(numCommunities), 0.0);
  for (Index a = 0; a < g.n(); ++a) {
    tot[community[a]] += g.strength[a];
    for (const auto& [b, w] : g.adj[a])
      if (community[a] == community[b]) in[community[a]] += w;
  }
  double q = 0.0;
  for (int c = 0; c < numCommunities; ++c) q += in[c] / g.twoM - (tot[c] / g.twoM) * (tot[c] / g.twoM);
  return q;
}

/// Relabels to 0..k-1 in order of first appearance; returns k.
inline int compact(std::vector<int>& community) {
  std::vector<int> map(community.size(), -1);
  int next = 0;
  for (int& c : community) {
    if (map[c] < 0) map[c] = next++;
    c = map[c];
  }
  return next;
}

/// Gain scale: moving node a (strength k) into community C, with a already
/// removed, changes Q by 2/twoM * (kIn(C) - tot(C) k / twoM). Only the bracket
/// is compared. An empty community scores 0.
///
/// Sweeps nodes in `order` until a full sweep moves nobody. A node moves only
/// for a strictly larger bracket than staying put; ties go to the first
/// candidate in scan order (current community, then neighbors' communities
/// by adjacency order, then a fresh empty community).
inline bool localMoves(const WeightedGraph& g, const std::vector<Index>& order, std::vector<int>& community) {
  const Index n = g.n();
  std::vector<double> tot(static_cast<std::size_t>(n), 0.0);
  std::vector<Index> size(static_cast<std::size_t>(n), 0);
  for (Index a = 0; a < n; ++a) {
    tot[community[a]] += g.strength[a];
    ++size[community[a]];
  }
  std::vector<double> kIn(static_cast<std::size_t>(n), 0.0);
  std::vector<int> seen;
  const double tiny = 1e-12 * std::max(1.0, g.twoM);
  bool movedAny = false;
  for (bool moved = true; moved;) {
    moved = false;
    for (Index a : order) {
      const int own = community[a];
      const double k = g.strength[a];
      seen.clear();
      for (const auto& [b, w] : g.adj[a]) {
        if (b == a) continue;
        const int cb = community[b];
        if (kIn[cb] == 0.0) seen.push_back(cb);
        kIn[cb] += w;
      }
      tot[own] -= k;
      --size[own];
      auto gain = [&](int c) { return kIn[c] - tot[c] * k / g.twoM; };
      int best = own;
      double bestGain = size[own] == 0 ? 0.0 : gain(own);
      for (int c : seen)
        if (c != own && gain(c) > bestGain + tiny) {
          best = c;
          bestGain = gain(c);
        }
      if (size[own] > 0 && bestGain < -tiny) {
        // An empty community (gain 0) beats every candidate.
        for (Index e = 0; e < n; ++e)
          if (size[e] == 0) {
            best = static_cast<int>(e);
            break;
          }
      }
      for (int c : seen) kIn[c] = 0.0;
      tot[best] += k;
      ++size[best];
      if (best != own) {
        community[a] = best;
        moved = movedAny = true;
      }
    }
  }
  return movedAny;
}

}  // namespace louvain_detail

/// Louvain: local moves in the given node order, aggregation, repeat until a
/// level changes nothing. Aggregated levels are swept in an order drawn from
/// `seed`. A last sweep of local moves on the original graph makes the result
/// stable under single-node moves.
inline Partition louvainCluster(const SimpleGraph& g, const std::vector<Index>& order, std::uint64_t seed) {
  const Index n = g.n();
  if (g.edgeCount() == 0) throw std::invalid_argument("louvainCluster: graph has no edges");
  {
    std::vector<bool> hit(static_cast<std::size_t>(n), false);
    if (static_cast<Index>(order.size()) != n) throw std::invalid_argument("louvainCluster: order is not a permutation");
    for (Index v : order) {
      if (v < 0 || v >= n || hit[v]) throw std::invalid_argument("louvainCluster: order is not a permutation");
      hit[v] = true;
    }
  }
  using namespace louvain_detail;
  Rng rng(seed);
  const WeightedGraph base = WeightedGraph::fromSimple(g);
  WeightedGraph level = base;
  std::vector<int> nodeToCommunity(static_cast<std::size_t>(n));
  std::iota(nodeToCommunity.begin(), nodeToCommunity.end(), 0);
  std::vector<Index> levelOrder = order;

  for (int depth = 0;; ++depth) {
    std::vector<int> community(static_cast<std::size_t>(level.n()));
    std::iota(community.begin(), community.end(), 0);
    if (!localMoves(level, levelOrder, community)) break;
    const int k = compact(community);
    for (int& c : nodeToCommunity) c = community[c];
    if (k == level.n()) break;
    level = aggregate(level, community, k);
    levelOrder.resize(static_cast<std::size_t>(k));
    std::iota(levelOrder.begin(), levelOrder.end(), Index{0});
    rng.split(static_cast<std::uint64_t>(depth)).shuffle(levelOrder);
  }
  localMoves(base, order, nodeToCommunity);
  return Partition(nodeToCommunity);
}

/// numOrders runs, each with an independent uniformly random node order.
inline std::vector<Partition> louvainBest(const SimpleGraph& g, int numOrders, std::uint64_t seed) {
  if (numOrders < 1) throw std::invalid_argument("louvainBest: numOrders must be >= 1");
  std::vector<Partition> out;
  out.reserve(static_cast<std::size_t>(numOrders));
  const Rng root(seed);
  for (int r = 0; r < numOrders; ++r) {
    std::vector<Index> order(static_cast<std::size_t>(g.n()));
    std::iota(order.begin(), order.end(), Index{0});
    root.split(2 * static_cast<std::uint64_t>(r)).shuffle(order);
    out.push_back(louvainCluster(g, order, root.split(2 * static_cast<std::uint64_t>(r) + 1).next()));
  }
  return out;
}

}  // namespace admipc

#endif  // ADMIPC_LOUVAIN_HPP
