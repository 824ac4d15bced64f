#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "mide/errors.hpp"
#include "mide/transport.hpp"

namespace mide::transport {

namespace {

constexpr double kPerturbation = 1e-12;

struct Cell {
  std::size_t i;
  std::size_t j;
  double flow;
};

// Spanning-tree basis over n row nodes (ids 0..n-1) and m column nodes
// (ids n..n+m-1). Each basic cell is an edge between row i and column j.
class TransportTree {
 public:
  TransportTree(const Matrix& cost, std::size_t n, std::size_t m)
      : cost_(cost), n_(n), m_(m), adjacency_(n + m), parent_edge_(n + m), depth_(n + m), u_(n), v_(m) {}

  void add(Cell cell) {
    const std::size_t e = cells_.size();
    cells_.push_back(cell);
    adjacency_[cell.i].push_back(e);
    adjacency_[n_ + cell.j].push_back(e);
  }

  void replace(std::size_t edge, Cell cell) {
    auto drop = [&](std::size_t node) {
      auto& adj = adjacency_[node];
      adj.erase(std::find(adj.begin(), adj.end(), edge));
    };
    drop(cells_[edge].i);
    drop(n_ + cells_[edge].j);
    cells_[edge] = cell;
    adjacency_[cell.i].push_back(edge);
    adjacency_[n_ + cell.j].push_back(edge);
  }

  // Roots the tree at row 0 and recomputes parent pointers, depths, and the
  // potentials u_0 = 0, u_i + v_j = C_ij on every basic cell.
  void refresh() {
    std::fill(parent_edge_.begin(), parent_edge_.end(), kNone);
    std::vector<bool> seen(n_ + m_, false);
    std::vector<std::size_t> queue{0};
    seen[0] = true;
    depth_[0] = 0;
    u_[0] = 0.0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t node = queue[head];
      for (std::size_t e : adjacency_[node]) {
        const Cell& c = cells_[e];
        const std::size_t other = node < n_ ? n_ + c.j : c.i;
        if (seen[other]) continue;
        seen[other] = true;
        parent_edge_[other] = e;
        depth_[other] = depth_[node] + 1;
        if (other >= n_) {
          v_[c.j] = cost_(c.i, c.j) - u_[c.i];
        } else {
          u_[c.i] = cost_(c.i, c.j) - v_[c.j];
        }
        queue.push_back(other);
      }
    }
    if (queue.size() != n_ + m_) throw NumericalError("transport simplex: basis is not a spanning tree");
  }

  // Basic edges on the tree path from column node n+j back to row node i,
  // in order of traversal starting at the column.
  std::vector<std::size_t> path_from_column_to_row(std::size_t j, std::size_t i) const {
    std::size_t a = n_ + j;
    std::size_t b = i;
    std::vector<std::size_t> from_a, from_b;
    while (depth_[a] > depth_[b]) {
      from_a.push_back(parent_edge_[a]);
      a = other_end(parent_edge_[a], a);
    }
    while (depth_[b] > depth_[a]) {
      from_b.push_back(parent_edge_[b]);
      b = other_end(parent_edge_[b], b);
    }
    while (a != b) {
      from_a.push_back(parent_edge_[a]);
      a = other_end(parent_edge_[a], a);
      from_b.push_back(parent_edge_[b]);
      b = other_end(parent_edge_[b], b);
    }
    from_a.insert(from_a.end(), from_b.rbegin(), from_b.rend());
    return from_a;
  }

  // Flows that the current basis induces for the given weights, by peeling
  // leaves off the tree.
  std::vector<double> flows_for(std::span<const double> ws, std::span<const double> wt) const {
    std::vector<double> remaining(n_ + m_);
    for (std::size_t i = 0; i < n_; ++i) remaining[i] = ws[i];
    for (std::size_t j = 0; j < m_; ++j) remaining[n_ + j] = wt[j];
    std::vector<std::size_t> degree(n_ + m_);
    for (std::size_t node = 0; node < n_ + m_; ++node) degree[node] = adjacency_[node].size();
    std::vector<bool> used(cells_.size(), false);
    std::vector<double> flow(cells_.size(), 0.0);
    std::vector<std::size_t> leaves;
    for (std::size_t node = 0; node < n_ + m_; ++node)
      if (degree[node] == 1) leaves.push_back(node);
    while (!leaves.empty()) {
      const std::size_t node = leaves.back();
      leaves.pop_back();
      if (degree[node] != 1) continue;
      std::size_t edge = kNone;
      for (std::size_t e : adjacency_[node])
        if (!used[e]) edge = e;
      used[edge] = true;
      flow[edge] = remaining[node];
      const std::size_t other = other_end(edge, node);
      remaining[other] -= remaining[node];
      remaining[node] = 0.0;
      --degree[node];
      if (--degree[other] == 1) leaves.push_back(other);
    }
    return flow;
  }

  std::vector<Cell>& cells() { return cells_; }
  const std::vector<Cell>& cells() const { return cells_; }
  const Vector& u() const { return u_; }
  const Vector& v() const { return v_; }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  std::size_t other_end(std::size_t edge, std::size_t node) const {
    const Cell& c = cells_[edge];
    return node < n_ ? n_ + c.j : c.i;
  }

  const Matrix& cost_;
  std::size_t n_, m_;
  std::vector<Cell> cells_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<std::size_t> parent_edge_;
  std::vector<std::size_t> depth_;
  Vector u_, v_;
};

}  // namespace

void validate_weights(std::span<const double> w_source, std::span<const double> w_target, std::size_t n,
                      std::size_t m) {
  if (w_source.size() != n || w_target.size() != m) throw InputError("transport: weights misaligned with costs");
  for (double w : w_source)
    if (!(w >= 0.0) || !std::isfinite(w)) throw InputError("transport: source weights must be nonnegative");
  for (double w : w_target)
    if (!(w >= 0.0) || !std::isfinite(w)) throw InputError("transport: target weights must be nonnegative");
  const double ss = pairwise_sum(w_source);
  const double st = pairwise_sum(w_target);
  if (std::abs(ss - st) > 1e-9) throw InputError("transport: infeasible weights (source and target totals differ)");
  if (std::abs(ss - 1.0) > 1e-9) throw InputError("transport: weights must sum to 1");
}

SimplexSolution solve_simplex(const CostMatrix& cost, std::span<const double> w_source,
                              std::span<const double> w_target) {
  const std::size_t n = cost.rows();
  const std::size_t m = cost.cols();
  if (n == 0 || m == 0) throw InputError("transport: empty cost matrix");
  validate_weights(w_source, w_target, n, m);
  for (double c : cost.entries.data())
    if (!std::isfinite(c)) throw InputError("transport: non-finite cost entry");

  // Perturbed supplies make every basic solution nondegenerate.
  Vector ws(w_source.begin(), w_source.end());
  Vector wt(w_target.begin(), w_target.end());
  for (auto& w : ws) w += kPerturbation;
  wt.back() += kPerturbation * static_cast<double>(n);

  TransportTree tree(cost.entries, n, m);
  {
    Vector supply = ws, demand = wt;
    std::size_t i = 0, j = 0;
    while (i < n && j < m) {
      const double f = std::min(supply[i], demand[j]);
      tree.add({i, j, f});
      supply[i] -= f;
      demand[j] -= f;
      if (i + 1 == n) {
        ++j;
      } else if (j + 1 == m) {
        ++i;
      } else if (supply[i] <= demand[j]) {
        ++i;
      } else {
        ++j;
      }
    }
  }
  if (tree.cells().size() != n + m - 1) throw NumericalError("transport simplex: bad initial basis");

  const double tolerance = 1e-12 * std::max(1.0, cost.entries.max_abs());
  std::vector<bool> in_basis(n * m, false);
  for (const auto& c : tree.cells()) in_basis[c.i * m + c.j] = true;

  std::size_t pivots = 0;
  const std::size_t pivot_limit = 50 * (n + m) * (n + m) + 1000;
  for (;;) {
    tree.refresh();
    const Vector& u = tree.u();
    const Vector& v = tree.v();

    // Bland's rule: first cell in row-major order with negative reduced cost.
    std::size_t enter_i = n, enter_j = m;
    for (std::size_t i = 0; i < n && enter_i == n; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (in_basis[i * m + j]) continue;
        if (cost.entries(i, j) - u[i] - v[j] < -tolerance) {
          enter_i = i;
          enter_j = j;
          break;
        }
      }
    }
    if (enter_i == n) break;
    if (++pivots > pivot_limit) throw NumericalError("transport simplex: pivot limit exceeded");

    const auto path = tree.path_from_column_to_row(enter_j, enter_i);
    // Edges alternate -, +, -, ... starting from the entering column.
    std::size_t leave = path.front();
    double theta = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < path.size(); k += 2) {
      const Cell& c = tree.cells()[path[k]];
      const Cell& best = tree.cells()[leave];
      if (c.flow < theta || (c.flow == theta && c.i * m + c.j < best.i * m + best.j)) {
        theta = c.flow;
        leave = path[k];
      }
    }
    for (std::size_t k = 0; k < path.size(); ++k) tree.cells()[path[k]].flow += (k % 2 == 0 ? -theta : theta);
    const Cell old = tree.cells()[leave];
    in_basis[old.i * m + old.j] = false;
    in_basis[enter_i * m + enter_j] = true;
    tree.replace(leave, {enter_i, enter_j, theta});
  }

  // Drop the perturbation: recompute flows on the optimal basis from the
  // original weights. Reduced costs do not depend on weights, so the basis
  // stays optimal.
  const auto flows = tree.flows_for(w_source, w_target);
  SimplexSolution out;
  out.plan.gamma = Matrix(n, m);
  out.plan.source_weights.assign(w_source.begin(), w_source.end());
  out.plan.target_weights.assign(w_target.begin(), w_target.end());
  for (std::size_t e = 0; e < flows.size(); ++e) {
    double f = flows[e];
    if (f < -1e-9) throw NumericalError("transport simplex: negative flow after removing perturbation");
    if (f < 0.0) f = 0.0;
    const Cell& c = tree.cells()[e];
    out.plan.gamma(c.i, c.j) = f;
  }
  Vector terms;
  terms.reserve(flows.size());
  for (const auto& c : tree.cells()) terms.push_back(out.plan.gamma(c.i, c.j) * cost.entries(c.i, c.j));
  out.plan.cost = pairwise_sum(terms);
  out.potentials = {tree.u(), tree.v()};
  out.pivots = pivots;
  return out;
}

}  // namespace mide::transport
