#include "canopy/hdbscan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "canopy/error.hpp"

namespace canopy {

ClusterLabels canonicalize_labels(std::span<const int> labels) {
  ClusterLabels out;
  out.labels.assign(labels.begin(), labels.end());
  std::vector<int> remap;
  int next = 0;
  for (int& l : out.labels) {
    if (l == kNoise) continue;
    if (l < 0) throw InvariantError("negative non-noise label");
    if (static_cast<std::size_t>(l) >= remap.size()) {
      remap.resize(static_cast<std::size_t>(l) + 1, -1);
    }
    if (remap[static_cast<std::size_t>(l)] < 0) {
      remap[static_cast<std::size_t>(l)] = next++;
    }
    l = remap[static_cast<std::size_t>(l)];
  }
  out.num_clusters = next;
  return out;
}

std::vector<std::vector<std::size_t>> cluster_members(const ClusterLabels& l) {
  std::vector<std::vector<std::size_t>> members(
      static_cast<std::size_t>(l.num_clusters));
  for (std::size_t i = 0; i < l.labels.size(); ++i) {
    if (l.labels[i] != kNoise) {
      members[static_cast<std::size_t>(l.labels[i])].push_back(i);
    }
  }
  return members;
}

std::vector<float> core_distances(const DistanceMatrix& d, int min_samples) {
  if (min_samples < 1) throw InvariantError("min_samples must be >= 1");
  if (d.n <= static_cast<std::size_t>(min_samples)) {
    throw InvariantError("need more than min_samples points, got " +
                         std::to_string(d.n));
  }
  std::vector<float> cores(d.n);
  std::vector<float> row(d.n - 1);
  for (std::size_t i = 0; i < d.n; ++i) {
    std::size_t k = 0;
    for (std::size_t j = 0; j < d.n; ++j) {
      if (j != i) row[k++] = d.at(i, j);
    }
    std::nth_element(row.begin(), row.begin() + (min_samples - 1), row.end());
    cores[i] = row[static_cast<std::size_t>(min_samples - 1)];
  }
  return cores;
}

DistanceMatrix mutual_reachability(const DistanceMatrix& d,
                                   std::span<const float> cores) {
  if (cores.size() != d.n) {
    throw InvariantError("core distances do not match matrix size");
  }
  DistanceMatrix m(d.n);
  for (std::size_t i = 0; i < d.n; ++i) {
    for (std::size_t j = i + 1; j < d.n; ++j) {
      const float w = std::max({cores[i], cores[j], d.at(i, j)});
      m.at(i, j) = w;
      m.at(j, i) = w;
    }
  }
  return m;
}

std::vector<MstEdge> minimum_spanning_tree(const DistanceMatrix& m) {
  const std::size_t n = m.n;
  std::vector<MstEdge> edges;
  if (n < 2) return edges;
  edges.reserve(n - 1);

  std::vector<char> in_tree(n, 0);
  std::vector<float> best(n, std::numeric_limits<float>::infinity());
  std::vector<std::uint32_t> parent(n, 0);
  in_tree[0] = 1;
  for (std::size_t j = 1; j < n; ++j) best[j] = m.at(0, j);

  for (std::size_t step = 1; step < n; ++step) {
    std::size_t next = n;
    float next_w = std::numeric_limits<float>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (!in_tree[j] && best[j] < next_w) {
        next_w = best[j];
        next = j;
      }
    }
    in_tree[next] = 1;
    const std::uint32_t a = parent[next];
    const std::uint32_t b = static_cast<std::uint32_t>(next);
    edges.push_back({std::min(a, b), std::max(a, b), next_w});
    for (std::size_t j = 0; j < n; ++j) {
      if (!in_tree[j] && m.at(next, j) < best[j]) {
        best[j] = m.at(next, j);
        parent[j] = static_cast<std::uint32_t>(next);
      }
    }
  }
  std::sort(edges.begin(), edges.end(), [](const MstEdge& a, const MstEdge& b) {
    if (a.w != b.w) return a.w < b.w;
    if (a.u != b.u) return a.u < b.u;
    return a.v < b.v;
  });
  return edges;
}

namespace {

// Finite lambda for exact duplicates; 1/d otherwise.
double to_lambda(double dist) { return 1.0 / std::max(dist, 1e-12); }

// Tied merge weights are collapsed into one multiway node so the hierarchy
// is a function of the filtration alone, not of edge order; ties are
// pervasive here because mutual reachability clamps distances to core
// values.
struct DendroNode {
  std::vector<std::int64_t> children;  // < n: leaf point, >= n: internal node
  double dist = 0.0;
  std::uint32_t size = 0;
};

struct CondensedNode {
  double birth_lambda = 0.0;
  double stability = 0.0;
  std::int64_t parent = -1;
  std::vector<std::int64_t> children;
  std::vector<std::pair<std::uint32_t, double>> points;  // (point, fall lambda)
};

class UnionFind {
public:
  explicit UnionFind(std::size_t n) : parent_(n) {
    for (std::size_t i = 0; i < n; ++i) parent_[i] = i;
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

private:
  std::vector<std::size_t> parent_;
};

void collect_leaves(const std::vector<DendroNode>& nodes, std::int64_t id,
                    std::size_t n, std::vector<std::uint32_t>& out) {
  std::vector<std::int64_t> stack{id};
  while (!stack.empty()) {
    const std::int64_t cur = stack.back();
    stack.pop_back();
    if (cur < static_cast<std::int64_t>(n)) {
      out.push_back(static_cast<std::uint32_t>(cur));
    } else {
      const auto& node = nodes[static_cast<std::size_t>(cur) - n];
      for (std::int64_t child : node.children) stack.push_back(child);
    }
  }
}

std::uint32_t subtree_size(const std::vector<DendroNode>& nodes,
                           std::int64_t id, std::size_t n) {
  if (id < static_cast<std::int64_t>(n)) return 1;
  return nodes[static_cast<std::size_t>(id) - n].size;
}

}  // namespace

ClusterLabels extract_clusters(const std::vector<MstEdge>& mst, std::size_t n,
                               int min_cluster_size) {
  if (min_cluster_size < 2) throw InvariantError("min_cluster_size must be >= 2");
  ClusterLabels out;
  out.labels.assign(n, kNoise);
  out.num_clusters = 0;
  if (n == 0) return out;
  if (n < static_cast<std::size_t>(min_cluster_size)) return out;

  // Single-linkage dendrogram from edges in ascending weight order.
  std::vector<MstEdge> edges = mst;
  std::sort(edges.begin(), edges.end(), [](const MstEdge& a, const MstEdge& b) {
    if (a.w != b.w) return a.w < b.w;
    if (a.u != b.u) return a.u < b.u;
    return a.v < b.v;
  });
  if (edges.size() + 1 != n) {
    throw InvariantError("spanning tree must have n-1 edges");
  }

  std::vector<DendroNode> nodes;
  nodes.reserve(n - 1);
  UnionFind uf(n);
  // Dendrogram subtree for each union-find representative.
  std::vector<std::int64_t> comp_node(n);
  for (std::size_t i = 0; i < n; ++i) comp_node[i] = static_cast<std::int64_t>(i);

  std::size_t i = 0;
  while (i < edges.size()) {
    std::size_t j = i;
    while (j < edges.size() && edges[j].w == edges[i].w) ++j;

    // Union the whole equal-weight batch over the pre-batch components.
    std::vector<std::size_t> touched;
    for (std::size_t k = i; k < j; ++k) {
      touched.push_back(uf.find(edges[k].u));
      touched.push_back(uf.find(edges[k].v));
      uf.unite(edges[k].u, edges[k].v);
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());

    // One multiway node per post-batch component; children are the distinct
    // pre-batch component subtrees.
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t pre : touched) groups[uf.find(pre)].push_back(pre);
    for (const auto& [root, pre_roots] : groups) {
      DendroNode node;
      node.dist = static_cast<double>(edges[i].w);
      node.size = 0;
      for (std::size_t pre : pre_roots) {
        node.children.push_back(comp_node[pre]);
        node.size += subtree_size(nodes, comp_node[pre], n);
      }
      nodes.push_back(std::move(node));
      comp_node[root] = static_cast<std::int64_t>(n + nodes.size() - 1);
    }
    i = j;
  }

  // Condense: walk top-down; a side smaller than min_cluster_size falls out
  // of the current condensed cluster at the split lambda.
  const std::size_t mcs = static_cast<std::size_t>(min_cluster_size);
  std::vector<CondensedNode> condensed;
  condensed.push_back(CondensedNode{});  // root, birth lambda 0

  std::vector<std::uint32_t> scratch;
  struct WorkItem {
    std::int64_t dendro;
    std::size_t cnode;
  };
  std::vector<WorkItem> work{{static_cast<std::int64_t>(n + nodes.size() - 1), 0}};
  while (!work.empty()) {
    WorkItem item = work.back();
    work.pop_back();
    std::int64_t cur = item.dendro;
    const std::size_t cnode = item.cnode;
    while (true) {
      const auto& node = nodes[static_cast<std::size_t>(cur) - n];
      const double lambda = to_lambda(node.dist);

      // Points under sub-threshold children fall out of the current cluster
      // at this split; children that keep min_cluster_size survive it.
      std::vector<std::int64_t> big;
      scratch.clear();
      for (std::int64_t child : node.children) {
        if (subtree_size(nodes, child, n) >= mcs) {
          big.push_back(child);
        } else {
          collect_leaves(nodes, child, n, scratch);
        }
      }
      for (std::uint32_t p : scratch) {
        condensed[cnode].points.emplace_back(p, lambda);
      }

      if (big.empty()) break;
      if (big.size() == 1) {
        cur = big.front();  // still >= mcs >= 2, so an internal node
        continue;
      }
      for (std::int64_t child : big) {
        CondensedNode cn;
        cn.birth_lambda = lambda;
        cn.parent = static_cast<std::int64_t>(cnode);
        condensed.push_back(cn);
        const std::size_t child_id = condensed.size() - 1;
        condensed[cnode].children.push_back(static_cast<std::int64_t>(child_id));
        work.push_back({child, child_id});
      }
      break;
    }
  }

  // Stability and bottom-up excess-of-mass selection. Children were appended
  // after parents, so reverse index order is children-first.
  const std::size_t num_condensed = condensed.size();
  std::vector<double> subtree_stability(num_condensed, 0.0);
  std::vector<char> selected(num_condensed, 0);
  for (std::size_t idx = num_condensed; idx-- > 0;) {
    auto& cn = condensed[idx];
    cn.stability = 0.0;
    for (const auto& [p, lambda] : cn.points) {
      cn.stability += lambda - cn.birth_lambda;
    }
    if (cn.children.empty()) {
      selected[idx] = 1;
      subtree_stability[idx] = cn.stability;
    } else {
      double child_sum = 0.0;
      for (std::int64_t c : cn.children) {
        child_sum += subtree_stability[static_cast<std::size_t>(c)];
      }
      if (child_sum > cn.stability) {
        subtree_stability[idx] = child_sum;
      } else {
        selected[idx] = 1;
        subtree_stability[idx] = cn.stability;
      }
    }
  }

  // Top-down: a selected ancestor owns its whole subtree.
  std::vector<std::int64_t> owner(num_condensed, -1);
  for (std::size_t idx = 0; idx < num_condensed; ++idx) {
    const std::int64_t parent = condensed[idx].parent;
    const std::int64_t inherited =
        parent >= 0 ? owner[static_cast<std::size_t>(parent)] : -1;
    if (inherited >= 0) {
      owner[idx] = inherited;
    } else if (selected[idx]) {
      owner[idx] = static_cast<std::int64_t>(idx);
    }
  }

  std::vector<int> raw(n, kNoise);
  for (std::size_t idx = 0; idx < num_condensed; ++idx) {
    if (owner[idx] < 0) continue;
    const int cluster = static_cast<int>(owner[idx]);
    for (const auto& [p, lambda] : condensed[idx].points) {
      raw[p] = cluster;
    }
  }
  return canonicalize_labels(raw);
}

ClusterLabels hdbscan(const DistanceMatrix& d, int min_cluster_size,
                      int min_samples) {
  const auto cores = core_distances(d, min_samples);
  const auto reach = mutual_reachability(d, cores);
  const auto mst = minimum_spanning_tree(reach);
  return extract_clusters(mst, d.n, min_cluster_size);
}

}  // namespace canopy
