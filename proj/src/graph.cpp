#include "multiscale/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace multiscale {

MetricGraph build_graph(const RandomSubstitutionSystem& sys, Weighting w) {
  MetricGraph g;
  g.vertex_count = sys.type_count();
  g.weighting = w;
  for (int i = 0; i < sys.type_count(); ++i) {
    for (std::size_t k = 0; k < sys.rules[i].size(); ++k) {
      const RuleSpec& rule = sys.rules[i][k];
      for (std::size_t t = 0; t < rule.tiles.size(); ++t) {
        const SubstitutionTileSpec& tile = rule.tiles[t];
        GraphEdge e;
        e.src = i;
        e.dst = tile.type;
        e.length = -std::log(tile.volume);
        e.weight = w == Weighting::probability ? rule.probability
                                               : rule.probability * tile.volume;
        e.rule_index = static_cast<int>(k);
        e.tile_position = static_cast<int>(t);
        g.edges.push_back(e);
      }
    }
  }
  return g;
}

GraphMatrixSample matrix_at(const MetricGraph& g, double s) {
  GraphMatrixSample r{Mat(g.vertex_count, g.vertex_count),
                      Mat(g.vertex_count, g.vertex_count)};
  for (const GraphEdge& e : g.edges) {
    double term = e.weight * std::exp(-e.length * s);
    r.M(e.src, e.dst) += term;
    r.M_prime(e.src, e.dst) -= e.length * term;
  }
  return r;
}

double solve_lambda(const MetricGraph& g) {
  auto rho = [&g](double s) { return spectral_radius(matrix_at(g, s).M); };

  double lo = -1.0, hi = 8.0;
  int guard = 0;
  while (rho(hi) > 1.0) {
    hi *= 2.0;
    if (++guard > 10) throw std::runtime_error("solve_lambda: no upper bracket below s = 8192");
  }
  guard = 0;
  while (rho(lo) < 1.0) {
    lo *= 2.0;
    if (++guard > 10) throw std::runtime_error("solve_lambda: no lower bracket above s = -1024");
  }
  // Invariant: rho(lo) >= 1 >= rho(hi); rho is continuous and strictly
  // decreasing, so bisection pins the crossing to full double precision
  // long before the iteration cap.
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (rho(mid) >= 1.0)
      lo = mid;
    else
      hi = mid;
  }
  double lambda = 0.5 * (lo + hi);
  if (std::abs(rho(lambda) - 1.0) > 1e-12)
    throw std::runtime_error("solve_lambda: bisection failed to pin rho(M(lambda)) = 1");
  return lambda;
}

Mat compute_Q(const MetricGraph& g) {
  double lambda = solve_lambda(g);
  GraphMatrixSample s = matrix_at(g, lambda);
  Mat adj = adjugate(Mat::identity(g.vertex_count) - s.M);
  double denom = -trace(adj * s.M_prime);
  if (!(std::abs(denom) > 1e-300))
    throw std::runtime_error("compute_Q: degenerate graph, zero normalizing trace");
  Mat q = adj;
  for (double& v : q.a) v /= denom;
  return q;
}

PerronData perron_data(const MetricGraph& g) {
  PerronData p;
  p.lambda = solve_lambda(g);
  Mat m = matrix_at(g, p.lambda).M;
  p.spectral_radius_at_lambda = spectral_radius(m);
  p.left_eigenvector = left_pf_eigenvector(m);
  p.right_eigenvector = right_pf_eigenvector(m);
  p.Q = compute_Q(g);
  return p;
}

namespace {

struct WalkContext {
  const MetricGraph* g;
  std::vector<std::vector<int>> out;  // edge indices by source vertex
  int target;
  double delta, eta, t;
  double total = 0.0;
  std::uint64_t visits = 0;
  std::uint64_t budget = 0;
};

void walk_dfs(WalkContext& ctx, int vertex, double length, double weight) {
  for (int ei : ctx.out[vertex]) {
    if (++ctx.visits > ctx.budget)
      throw std::runtime_error("brute_force_walk_sum: node budget exceeded");
    const GraphEdge& e = ctx.g->edges[ei];
    if (ei == ctx.target && length + ctx.delta < ctx.t && ctx.t <= length + ctx.eta)
      ctx.total += weight * e.weight;
    if (length + e.length < ctx.t)
      walk_dfs(ctx, e.dst, length + e.length, weight * e.weight);
  }
}

std::vector<std::vector<int>> out_edges(const MetricGraph& g) {
  std::vector<std::vector<int>> out(g.vertex_count);
  for (std::size_t i = 0; i < g.edges.size(); ++i)
    out[g.edges[i].src].push_back(static_cast<int>(i));
  return out;
}

}  // namespace

double brute_force_walk_sum(const MetricGraph& g, int i, int target_edge, double delta,
                            double eta, double t, std::uint64_t node_budget) {
  if (i < 0 || i >= g.vertex_count)
    throw std::invalid_argument("brute_force_walk_sum: start vertex out of range");
  if (target_edge < 0 || target_edge >= static_cast<int>(g.edges.size()))
    throw std::invalid_argument("brute_force_walk_sum: target edge out of range");
  if (!(delta <= eta))
    throw std::invalid_argument("brute_force_walk_sum: need delta <= eta");
  WalkContext ctx;
  ctx.g = &g;
  ctx.out = out_edges(g);
  ctx.target = target_edge;
  ctx.delta = delta;
  ctx.eta = eta;
  ctx.t = t;
  ctx.budget = node_budget;
  walk_dfs(ctx, i, 0.0, 1.0);
  return ctx.total;
}

double brute_force_total_count(const MetricGraph& g, int i, double t,
                               std::uint64_t node_budget) {
  double total = 0.0;
  for (std::size_t e = 0; e < g.edges.size(); ++e)
    total += brute_force_walk_sum(g, i, static_cast<int>(e), 0.0, g.edges[e].length, t,
                                  node_budget);
  return total;
}

namespace {

void reach(const std::vector<std::vector<int>>& adj, int start, std::vector<char>& seen) {
  std::vector<int> stack{start};
  seen.assign(adj.size(), 0);
  seen[start] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : adj[v])
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
  }
}

}  // namespace

bool strongly_connected(const MetricGraph& g) {
  if (g.vertex_count == 0) return false;
  std::vector<std::vector<int>> fwd(g.vertex_count), rev(g.vertex_count);
  for (const GraphEdge& e : g.edges) {
    fwd[e.src].push_back(e.dst);
    rev[e.dst].push_back(e.src);
  }
  std::vector<char> seen;
  reach(fwd, 0, seen);
  if (std::count(seen.begin(), seen.end(), 1) != g.vertex_count) return false;
  reach(rev, 0, seen);
  return std::count(seen.begin(), seen.end(), 1) == g.vertex_count;
}

namespace {

// Is r within tol of p/q for some q <= max_q? Any such fraction is a
// continued-fraction convergent of r as long as tol <= 1/(2 max_q^2), which
// holds for tol = 1e-9, max_q = 1e4 — so scanning convergents is exhaustive.
bool ratio_rational(double r, long max_q, double tol) {
  double x = r;
  long p_prev = 1, q_prev = 0;
  long p_cur = static_cast<long>(std::floor(x));
  long q_cur = 1;
  if (std::abs(r - static_cast<double>(p_cur)) <= tol) return true;
  for (int it = 0; it < 64; ++it) {
    double frac = x - std::floor(x);
    if (frac < 1e-15) break;
    x = 1.0 / frac;
    long a = static_cast<long>(std::floor(x));
    long p_next = a * p_cur + p_prev;
    long q_next = a * q_cur + q_prev;
    if (q_next > max_q || q_next <= 0) break;  // <= 0 guards overflow
    p_prev = p_cur;
    q_prev = q_cur;
    p_cur = p_next;
    q_cur = q_next;
    if (std::abs(r - static_cast<double>(p_cur) / static_cast<double>(q_cur)) <= tol)
      return true;
  }
  return false;
}

struct CycleContext {
  const MetricGraph* g;
  std::vector<std::vector<int>> out;
  std::vector<char> on_path;
  std::vector<double> lengths;
  int root = 0;
  std::size_t cap = 0;
  bool truncated = false;
};

// Enumerate simple cycles whose smallest vertex is the root: the standard
// trick for visiting each cycle exactly once. Parallel edges count as
// distinct cycles (they can carry different lengths).
void cycle_dfs(CycleContext& ctx, int vertex, double length) {
  for (int ei : ctx.out[vertex]) {
    const GraphEdge& e = ctx.g->edges[ei];
    if (e.dst < ctx.root) continue;
    if (e.dst == ctx.root) {
      if (ctx.lengths.size() >= ctx.cap) {
        ctx.truncated = true;
        continue;
      }
      ctx.lengths.push_back(length + e.length);
    } else if (!ctx.on_path[e.dst]) {
      ctx.on_path[e.dst] = 1;
      cycle_dfs(ctx, e.dst, length + e.length);
      ctx.on_path[e.dst] = 0;
    }
  }
}

}  // namespace

Commensurability check_incommensurable(const MetricGraph& g) {
  CycleContext ctx;
  ctx.g = &g;
  ctx.out = out_edges(g);
  ctx.cap = 20000;
  for (int root = 0; root < g.vertex_count; ++root) {
    ctx.root = root;
    ctx.on_path.assign(g.vertex_count, 0);
    ctx.on_path[root] = 1;
    cycle_dfs(ctx, root, 0.0);
  }
  if (ctx.lengths.size() < 2)
    return ctx.truncated ? Commensurability::unknown
                         : Commensurability::commensurable;  // a single cycle is trivially so

  bool all_rational = true;
  for (std::size_t i = 0; i < ctx.lengths.size() && all_rational; ++i)
    for (std::size_t j = i + 1; j < ctx.lengths.size(); ++j) {
      double a = std::max(ctx.lengths[i], ctx.lengths[j]);
      double b = std::min(ctx.lengths[i], ctx.lengths[j]);
      if (!(b > 0.0)) continue;
      if (!ratio_rational(a / b, 10000, 1e-9)) {
        all_rational = false;
        break;
      }
    }
  if (!all_rational) return Commensurability::likely_incommensurable;
  return ctx.truncated ? Commensurability::unknown : Commensurability::commensurable;
}

}  // namespace multiscale
