#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <numeric>
#include <tuple>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"
#include "spectral.hpp"

namespace gsr {

struct Edge {
  std::size_t u = 0;
  std::size_t v = 0;
  double weight = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected weighted graph without self-loops or parallel edges.
/// Edges are stored with u < v, sorted by (u, v).
class Graph {
public:
  Graph(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)), degrees_(n, 0.0) {
    if (n_ < 1) throw InputError("Graph: need at least one vertex");
    for (auto& e : edges_) {
      if (e.u >= n_ || e.v >= n_) throw InputError("Graph: edge endpoint out of range");
      if (e.u == e.v) throw InputError("Graph: self-loops are not allowed");
      if (!(e.weight > 0.0) || !std::isfinite(e.weight))
        throw InputError("Graph: edge weights must be positive and finite");
      if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(edges_.begin(), edges_.end(),
              [](const Edge& a, const Edge& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
    for (std::size_t i = 1; i < edges_.size(); ++i)
      if (edges_[i].u == edges_[i - 1].u && edges_[i].v == edges_[i - 1].v)
        throw InputError("Graph: duplicate edge");
    for (const auto& e : edges_) {
      degrees_[e.u] += e.weight;
      degrees_[e.v] += e.weight;
    }
  }

  std::size_t size() const noexcept { return n_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<double>& degrees() const noexcept { return degrees_; }

  /// Adjacency lists (neighbor, weight), neighbors ascending.
  std::vector<std::vector<std::pair<std::size_t, double>>> adjacency() const {
    std::vector<std::vector<std::pair<std::size_t, double>>> adj(n_);
    for (const auto& e : edges_) {
      adj[e.u].emplace_back(e.v, e.weight);
      adj[e.v].emplace_back(e.u, e.weight);
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());
    return adj;
  }

  /// Connected component label per vertex; labels are numbered in order of
  /// each component's smallest vertex.
  std::vector<std::size_t> components() const {
    std::vector<std::size_t> parent(n_);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const auto& e : edges_) {
      auto a = find(e.u), b = find(e.v);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::vector<std::size_t> label(n_), root_label(n_, n_);
    std::size_t next = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      auto r = find(i);
      if (root_label[r] == n_) root_label[r] = next++;
      label[i] = root_label[r];
    }
    return label;
  }

  bool connected() const {
    auto c = components();
    return std::all_of(c.begin(), c.end(), [](std::size_t l) { return l == 0; });
  }

private:
  std::size_t n_;
  std::vector<Edge> edges_;
  std::vector<double> degrees_;
};

/// Real-valued signal on the vertices of a graph.
struct GraphSignal {
  Vector values;

  GraphSignal() = default;
  explicit GraphSignal(Vector v) : values(std::move(v)) {}
  static GraphSignal zeros(std::size_t n) { return GraphSignal(Vector::Zero(n)); }

  std::size_t size() const noexcept { return static_cast<std::size_t>(values.size()); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
};

/// L = I - D^{-1/2} W D^{-1/2}. A vertex with zero degree gets an all-zero
/// row and column.
inline SymMatrix normalized_laplacian(const Graph& g) {
  const std::size_t n = g.size();
  Matrix l = Matrix::Zero(n, n);
  std::vector<double> inv_sqrt(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (g.degrees()[i] > 0) {
      inv_sqrt[i] = 1.0 / std::sqrt(g.degrees()[i]);
      l(i, i) = 1.0;
    }
  }
  for (const auto& e : g.edges()) {
    const double w = -e.weight * inv_sqrt[e.u] * inv_sqrt[e.v];
    l(e.u, e.v) = w;
    l(e.v, e.u) = w;
  }
  return SymMatrix(std::move(l));
}

/// Graph Fourier basis: eigenpairs of the symmetric normalized Laplacian.
class GftBasis {
public:
  explicit GftBasis(EigenDecomposition d) : d_(std::move(d)) {}

  std::size_t size() const noexcept { return d_.size(); }
  const Vector& frequencies() const noexcept { return d_.eigenvalues; }
  const Matrix& vectors() const noexcept { return d_.eigenvectors; }
  const EigenDecomposition& decomposition() const noexcept { return d_; }

private:
  EigenDecomposition d_;
};

inline GftBasis gft_basis(const Graph& g) { return GftBasis(sym_eigen(normalized_laplacian(g))); }

/// Forward transform U^T f.
inline Vector gft(const GftBasis& basis, const GraphSignal& f) {
  detail::require_same_size(basis.size(), f.size(), "gft");
  return basis.vectors().transpose() * f.values;
}

/// Inverse transform U fhat.
inline GraphSignal igft(const GftBasis& basis, const Vector& fhat) {
  detail::require_same_size(basis.size(), static_cast<std::size_t>(fhat.size()), "igft");
  return GraphSignal(basis.vectors() * fhat);
}

// ---------------------------------------------------------------------------
// Random geometric graphs

struct GeometricGraphParams {
  /// Connection radius. Zero selects radius_scale * sqrt(ln n / (pi n)).
  double radius = 0.0;
  double radius_scale = 1.2;
};

struct GeometricGraph {
  Graph graph;
  std::vector<std::pair<double, double>> points;
  double radius;
};

inline double default_geometric_radius(std::size_t n, double scale) {
  const double nn = static_cast<double>(n);
  return scale * std::sqrt(std::log(nn) / (std::numbers::pi * nn));
}

/// n points uniform on the unit square, edges between points closer than r
/// with weights exp(-d^2 / (2 sigma^2)), sigma = r / 2. Components left over
/// are joined to the rest through their closest inter-component pair, so the
/// result is always connected.
inline GeometricGraph random_geometric_graph_with_points(std::size_t n, std::uint64_t seed,
                                                         const GeometricGraphParams& params = {}) {
  if (n < 2) throw InputError("random_geometric_graph: n must be >= 2");
  const double r = params.radius > 0 ? params.radius : default_geometric_radius(n, params.radius_scale);
  const double sigma = r / 2.0;
  auto weight_of = [&](double d2) {
    return std::max(std::exp(-d2 / (2.0 * sigma * sigma)), std::numeric_limits<double>::min());
  };

  Rng rng(derive_seed(seed, {0x9e0}));
  std::vector<std::pair<double, double>> pts(n);
  for (auto& p : pts) {
    p.first = rng.uniform();
    p.second = rng.uniform();
  }
  auto dist2 = [&](std::size_t a, std::size_t b) {
    const double dx = pts[a].first - pts[b].first, dy = pts[a].second - pts[b].second;
    return dx * dx + dy * dy;
  };

  std::vector<Edge> edges;
  const double r2 = r * r;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (double d2 = dist2(i, j); d2 < r2) edges.push_back({i, j, weight_of(d2)});

  for (;;) {
    Graph g(n, edges);
    auto label = g.components();
    const std::size_t count = *std::max_element(label.begin(), label.end()) + 1;
    if (count == 1) return {std::move(g), std::move(pts), r};
    // Join the highest-numbered component to its nearest outside vertex.
    const std::size_t target = count - 1;
    double best = std::numeric_limits<double>::infinity();
    std::size_t ba = 0, bb = 0;
    for (std::size_t a = 0; a < n; ++a) {
      if (label[a] != target) continue;
      for (std::size_t b = 0; b < n; ++b) {
        if (label[b] == target) continue;
        if (double d2 = dist2(a, b); d2 < best) {
          best = d2;
          ba = a;
          bb = b;
        }
      }
    }
    edges.push_back({std::min(ba, bb), std::max(ba, bb), weight_of(best)});
  }
}

inline Graph random_geometric_graph(std::size_t n, std::uint64_t seed, const GeometricGraphParams& params = {}) {
  return random_geometric_graph_with_points(n, seed, params).graph;
}

// ---------------------------------------------------------------------------
// Edge-list text format: "#n=<count>" then one "u<TAB>v<TAB>weight" per edge.

inline void write_edge_list(std::ostream& os, const Graph& g) {
  os << "#n=" << g.size() << '\n';
  os << std::setprecision(17);
  for (const auto& e : g.edges()) os << e.u << '\t' << e.v << '\t' << e.weight << '\n';
}

inline Graph read_edge_list(std::istream& is) {
  std::string line;
  std::size_t n = 0;
  bool have_n = false;
  std::vector<Edge> edges;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("#n=", 0) == 0) {
        try {
          n = std::stoull(line.substr(3));
        } catch (const std::exception&) {
          throw DataError("edge list: bad header at line " + std::to_string(lineno));
        }
        have_n = true;
      }
      continue;
    }
    std::istringstream ss(line);
    Edge e;
    if (!(ss >> e.u >> e.v >> e.weight)) throw DataError("edge list: malformed line " + std::to_string(lineno));
    edges.push_back(e);
  }
  if (!have_n) throw DataError("edge list: missing #n=<count> header");
  try {
    return Graph(n, std::move(edges));
  } catch (const InputError& err) {
    throw DataError(std::string("edge list: ") + err.what());
  }
}

inline void save_edge_list(const std::string& path, const Graph& g) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open " + path + " for writing");
  write_edge_list(os, g);
}

inline Graph load_edge_list(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open " + path);
  return read_edge_list(is);
}

}  // namespace gsr
