#pragma once

#include <map>
#include <queue>

#include "hypkern/kernel.hpp"
#include "hypkern/minkowski.hpp"

namespace hypkern {

/// Finite weighted metric tree with path-metric queries.  Connectivity and
/// acyclicity (|edges| = |nodes| - 1 plus connectedness) are verified at
/// construction; all-pairs distances are precomputed.
class MetricTree {
 public:
  struct Edge {
    std::string u, v;
    double length;
  };

  MetricTree(std::vector<std::string> nodes, const std::vector<Edge>& edges)
      : nodes_(std::move(nodes)) {
    const std::size_t n = nodes_.size();
    if (n == 0) throw std::invalid_argument("MetricTree: need at least one node");
    for (std::size_t i = 0; i < n; ++i) {
      if (index_.count(nodes_[i]))
        throw std::invalid_argument("MetricTree: duplicate node label " + nodes_[i]);
      index_[nodes_[i]] = static_cast<int>(i);
    }
    if (edges.size() != n - 1)
      throw std::invalid_argument("MetricTree: a tree on " + std::to_string(n) +
                                  " nodes needs exactly " + std::to_string(n - 1) + " edges");
    adj_.resize(n);
    for (const Edge& e : edges) {
      if (!(e.length > 0.0)) throw std::invalid_argument("MetricTree: edge lengths must be > 0");
      const int a = index(e.u), b = index(e.v);
      if (a == b) throw std::invalid_argument("MetricTree: self-loop at " + e.u);
      adj_[a].emplace_back(b, e.length);
      adj_[b].emplace_back(a, e.length);
    }

    dist_ = RealMatrix(n, n, -1.0);
    parent_.assign(n, std::vector<int>(n, -1));
    for (std::size_t s = 0; s < n; ++s) {
      std::queue<int> q;
      q.push(static_cast<int>(s));
      dist_(s, s) = 0.0;
      std::size_t reached = 1;
      while (!q.empty()) {
        const int cur = q.front();
        q.pop();
        for (const auto& [nxt, len] : adj_[cur]) {
          if (dist_(s, nxt) >= 0.0) continue;
          dist_(s, nxt) = dist_(s, cur) + len;
          parent_[s][nxt] = cur;
          ++reached;
          q.push(nxt);
        }
      }
      if (reached != n) throw std::invalid_argument("MetricTree: graph is not connected");
    }
  }

  std::size_t size() const { return nodes_.size(); }
  const std::vector<std::string>& nodes() const { return nodes_; }

  int index(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw std::invalid_argument("MetricTree: unknown label " + label);
    return it->second;
  }

  double distance(int a, int b) const { return dist_(a, b); }
  double distance(const std::string& a, const std::string& b) const {
    return dist_(index(a), index(b));
  }

  /// Whether x0 lies on the unique path from j to k (endpoints included).
  bool on_path(int x0, int j, int k) const {
    int cur = k;  // walk the parent chain of the BFS tree rooted at j
    while (cur != -1) {
      if (cur == x0) return true;
      if (cur == j) return false;
      cur = parent_[j][cur];
    }
    return false;
  }

  bool is_leaf(int i) const { return adj_[i].size() <= 1; }

 private:
  std::vector<std::string> nodes_;
  std::map<std::string, int> index_;
  std::vector<std::vector<std::pair<int, double>>> adj_;
  RealMatrix dist_;
  std::vector<std::vector<int>> parent_;
};

/// The tree kernel lambda^d on all nodes; of real hyperbolic type for every
/// lambda >= 1 (identically 1 at lambda = 1).
inline ComplexHyperbolicKernel tree_kernel(const MetricTree& t, double lambda) {
  if (!(lambda >= 1.0)) throw std::domain_error("tree_kernel: lambda must be >= 1");
  const std::size_t n = t.size();
  RealMatrix beta(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    beta(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j)
      beta(i, j) = beta(j, i) =
          std::pow(lambda, t.distance(static_cast<int>(i), static_cast<int>(j)));
  }
  return ComplexHyperbolicKernel(t.nodes(), std::move(beta));
}

/// Base-matrix entry for the tree kernel written as a single power of the
/// summed exponent, lambda^(d(j,x0)+d(x0,k)) - lambda^(d(j,k)).  With exactly
/// representable edge lengths this vanishes bitwise exactly when x0 separates
/// j from k, which is the engine of the tree-kernel positivity proof.
inline double tree_phi_entry(const MetricTree& t, double lambda, int x0, int j, int k) {
  return std::pow(lambda, t.distance(j, x0) + t.distance(x0, k)) -
         std::pow(lambda, t.distance(j, k));
}

// ---------------------------------------------------------------------------
// Glueing at the kernel level

/// A kernel patch ready for glueing: labels, the beta matrix (lambda^d form
/// for the recorded lambda), and the designated glue point.
struct GluePatch {
  std::vector<std::string> labels;
  RealMatrix beta;
  double lambda = 1.0;
  int glue_index = 0;

  int index(const std::string& label) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == label) return static_cast<int>(i);
    throw std::invalid_argument("GluePatch: unknown label " + label);
  }
};

/// Glue two patches at their designated points.  Distances add through the
/// glue point, so the lambda^d entries multiply across it; the identified
/// point keeps X's label.
inline GluePatch glue_kernels(const GluePatch& x, const GluePatch& y) {
  if (x.lambda != y.lambda)
    throw std::invalid_argument("glue_kernels: lambda mismatch (" + std::to_string(x.lambda) +
                                " vs " + std::to_string(y.lambda) + ")");
  const std::size_t nx = x.labels.size(), ny = y.labels.size();
  if (x.beta.rows() != nx || y.beta.rows() != ny || x.glue_index < 0 ||
      static_cast<std::size_t>(x.glue_index) >= nx || y.glue_index < 0 ||
      static_cast<std::size_t>(y.glue_index) >= ny)
    throw std::invalid_argument("glue_kernels: malformed patch");

  GluePatch out;
  out.lambda = x.lambda;
  out.glue_index = x.glue_index;
  out.labels = x.labels;
  std::vector<int> ymap;  // row in y -> row in output, glue point folded into x
  ymap.reserve(ny);
  for (std::size_t i = 0; i < ny; ++i) {
    if (static_cast<int>(i) == y.glue_index) {
      ymap.push_back(x.glue_index);
      continue;
    }
    for (const std::string& l : x.labels)
      if (l == y.labels[i])
        throw std::invalid_argument("glue_kernels: duplicate label " + l + " across patches");
    ymap.push_back(static_cast<int>(out.labels.size()));
    out.labels.push_back(y.labels[i]);
  }

  const std::size_t n = out.labels.size();
  out.beta = RealMatrix(n, n);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < nx; ++j) out.beta(i, j) = x.beta(i, j);
  for (std::size_t i = 0; i < ny; ++i)
    for (std::size_t j = 0; j < ny; ++j)
      out.beta(ymap[i], ymap[j]) = y.beta(i, j);
  for (std::size_t i = 0; i < nx; ++i) {
    if (static_cast<int>(i) == x.glue_index) continue;
    for (std::size_t j = 0; j < ny; ++j) {
      if (static_cast<int>(j) == y.glue_index) continue;
      const double mixed = x.beta(i, x.glue_index) * y.beta(y.glue_index, j);
      out.beta(i, ymap[j]) = mixed;
      out.beta(ymap[j], i) = mixed;
    }
  }
  return out;
}

/// Exponential kernel lambda^d on a sampled point set in real hyperbolic
/// space; of real hyperbolic type for all 1 <= lambda <= e (no verdict either
/// way is asserted for lambda > e).
inline ComplexHyperbolicKernel exp_kernel(const std::vector<MinkowskiPoint>& points,
                                          double lambda) {
  if (!(lambda >= 1.0)) throw std::domain_error("exp_kernel: lambda must be >= 1");
  if (points.empty()) throw std::invalid_argument("exp_kernel: need at least 1 point");
  const std::size_t m = points.size();
  RealMatrix beta(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    beta(i, i) = 1.0;
    for (std::size_t j = i + 1; j < m; ++j)
      beta(i, j) = beta(j, i) = std::pow(lambda, dist(points[i], points[j]));
  }
  return ComplexHyperbolicKernel(std::move(beta));
}

// ---------------------------------------------------------------------------
// Finite free products (iterated glueings)

struct GlueAttachment {
  int patch_a = 0;
  std::string point_a;
  int patch_b = 0;
  std::string point_b;
};

/// Iterated glue_kernels over a finite tree of attachments.  The attachment
/// list must join the patches into a single component without cycles; labels
/// must be globally unique (the file loader prefixes them per patch).
inline GluePatch free_product_kernel(std::vector<GluePatch> patches,
                                     const std::vector<GlueAttachment>& attachments) {
  if (patches.empty()) throw std::invalid_argument("free_product_kernel: no patches");
  if (attachments.size() != patches.size() - 1)
    throw std::invalid_argument("free_product_kernel: glueing spec must form a tree (" +
                                std::to_string(patches.size() - 1) + " attachments expected)");

  std::vector<int> root(patches.size());
  for (std::size_t i = 0; i < patches.size(); ++i) root[i] = static_cast<int>(i);
  auto find = [&](int i) {
    while (root[i] != i) i = root[i] = root[root[i]];
    return i;
  };
  std::vector<GluePatch> comp = std::move(patches);
  // alias map: a glued-away label resolves to its surviving partner
  std::map<std::string, std::string> alias;
  auto resolve = [&](std::string l) {
    while (alias.count(l)) l = alias.at(l);
    return l;
  };

  for (const GlueAttachment& at : attachments) {
    if (at.patch_a < 0 || at.patch_b < 0 ||
        static_cast<std::size_t>(at.patch_a) >= comp.size() ||
        static_cast<std::size_t>(at.patch_b) >= comp.size())
      throw std::invalid_argument("free_product_kernel: patch index out of range");
    const int ra = find(at.patch_a), rb = find(at.patch_b);
    if (ra == rb)
      throw std::invalid_argument("free_product_kernel: glueing spec contains a cycle");
    GluePatch x = std::move(comp[ra]);
    GluePatch y = std::move(comp[rb]);
    x.glue_index = x.index(resolve(at.point_a));
    y.glue_index = y.index(resolve(at.point_b));
    alias[y.labels[y.glue_index]] = x.labels[x.glue_index];
    comp[ra] = glue_kernels(x, y);
    root[rb] = ra;
  }
  return comp[find(0)];
}

inline ComplexHyperbolicKernel to_kernel(const GluePatch& p) {
  return ComplexHyperbolicKernel(p.labels, p.beta);
}

}  // namespace hypkern
