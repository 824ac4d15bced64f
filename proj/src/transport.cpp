#include <algorithm>
#include <cmath>
#include <optional>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "mide/errors.hpp"
#include "mide/linalg.hpp"
#include "mide/transport.hpp"

namespace mide::transport {

std::string_view to_string(CostVariant variant) {
  return variant == CostVariant::paper_cij ? "paper_cij" : "hilbertian_sq";
}

CostVariant cost_variant_from_string(std::string_view name) {
  if (name == "paper_cij") return CostVariant::paper_cij;
  if (name == "hilbertian_sq") return CostVariant::hilbertian_sq;
  throw InputError("unknown cost variant '" + std::string(name) + "'");
}

CostMatrix build_cost(const kernels::KernelSpec& spec, const Matrix& a, const Matrix& b, CostVariant variant) {
  spec.validate();
  if (a.empty() || b.empty()) throw InputError("build_cost: empty sample");
  if (a.cols() != b.cols()) throw InputError("build_cost: samples live in different dimensions");
  const std::size_t n = a.rows();
  const std::size_t m = b.rows();
  const auto kab = kernels::gram(spec, a, b);
  CostMatrix out{Matrix(n, m), variant, 0};

  if (variant == CostVariant::paper_cij) {
    if (n != m) throw InputError("paper_cij cost needs equal sample sizes");
    const auto kaa = kernels::gram(spec, a);
    const auto kbb = kernels::gram(spec, b);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        const double c = kaa(i, j) + kbb(i, j) - 2.0 * kab(i, j);
        out.entries(i, j) = c;
        if (c < 0.0) ++out.negative_entries;
      }
    return out;
  }

  Vector da(n), db(m);
  for (std::size_t i = 0; i < n; ++i) da[i] = kernels::eval_kernel(spec, a.row(i), a.row(i));
  for (std::size_t j = 0; j < m; ++j) db[j] = kernels::eval_kernel(spec, b.row(j), b.row(j));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const double c = da[i] + db[j] - 2.0 * kab(i, j);
      if (c < -1e-12) throw NumericalError("build_cost: negative squared Hilbertian distance");
      out.entries(i, j) = std::max(0.0, c);
    }
  return out;
}

CostMatrix make_cost(Matrix entries) {
  for (double c : entries.data())
    if (!std::isfinite(c)) throw InputError("cost matrix has non-finite entries");
  CostMatrix out{std::move(entries), CostVariant::hilbertian_sq, 0};
  for (double c : out.entries.data())
    if (c < 0.0) ++out.negative_entries;
  return out;
}

std::size_t TransportPlan::support(double threshold) const {
  return static_cast<std::size_t>(
      std::count_if(gamma.data().begin(), gamma.data().end(), [&](double g) { return g > threshold; }));
}

double TransportPlan::marginal_violation() const {
  double worst = 0.0;
  const Vector rs = source_marginal();
  const Vector cs = target_marginal();
  for (std::size_t i = 0; i < rs.size(); ++i) worst = std::max(worst, std::abs(rs[i] - source_weights[i]));
  for (std::size_t j = 0; j < cs.size(); ++j) worst = std::max(worst, std::abs(cs[j] - target_weights[j]));
  return worst;
}

namespace {

double plan_cost(const Matrix& gamma, const Matrix& cost) {
  Vector rows(gamma.rows());
  for (std::size_t i = 0; i < gamma.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < gamma.cols(); ++j) s += gamma(i, j) * cost(i, j);
    rows[i] = s;
  }
  return pairwise_sum(rows);
}

// Row and column residuals of x against the weights, with the last column
// constraint dropped (it is implied by the others).
Vector constraint_residual(const Matrix& x, std::span<const double> ws, std::span<const double> wt) {
  const std::size_t n = x.rows();
  const std::size_t m = x.cols();
  Vector r(n + m - 1);
  const Vector rs = x.row_sums();
  const Vector cs = x.col_sums();
  for (std::size_t i = 0; i < n; ++i) r[i] = ws[i] - rs[i];
  for (std::size_t j = 0; j + 1 < m; ++j) r[n + j] = wt[j] - cs[j];
  return r;
}

// A D^2 A^T for the transportation constraint matrix with scaling d = x^2.
Matrix normal_matrix(const Matrix& d) {
  const std::size_t n = d.rows();
  const std::size_t m = d.cols();
  Matrix s(n + m - 1, n + m - 1);
  const Vector rs = d.row_sums();
  const Vector cs = d.col_sums();
  for (std::size_t i = 0; i < n; ++i) s(i, i) = rs[i];
  for (std::size_t j = 0; j + 1 < m; ++j) s(n + j, n + j) = cs[j];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j + 1 < m; ++j) s(i, n + j) = s(n + j, i) = d(i, j);
  return s;
}

// A^T y laid out as an n x m matrix: y_i + y_{n+j} (y_{n+m-1} = 0).
// Solves with the symmetrically diagonal-scaled normal matrix. The raw matrix
// spans many orders of magnitude once entries of x approach zero, and on a
// degenerate optimal face it tends to a singular limit. Pivots that vanish
// relative to the unit diagonal are replaced by a huge value, which pins the
// matching component of y near zero instead of amplifying rounding error.
Vector scaled_solve(const Matrix& s, const Vector& rhs) {
  using Real = long double;
  const std::size_t k = s.rows();
  std::vector<Real> scale(k), l(k * k, 0.0L), y(k), out(k);
  for (std::size_t i = 0; i < k; ++i) scale[i] = s(i, i) > 0.0 ? 1.0L / std::sqrt(Real(s(i, i))) : 1.0L;
  for (std::size_t j = 0; j < k; ++j) {
    Real d = Real(s(j, j)) * scale[j] * scale[j];
    for (std::size_t q = 0; q < j; ++q) d -= l[j * k + q] * l[j * k + q];
    if (!std::isfinite(d)) throw NumericalError("affine scaling: non-finite pivot");
    l[j * k + j] = d > 1e-16L ? std::sqrt(d) : 1e32L;
    for (std::size_t i = j + 1; i < k; ++i) {
      Real v = Real(s(i, j)) * scale[i] * scale[j];
      for (std::size_t q = 0; q < j; ++q) v -= l[i * k + q] * l[j * k + q];
      l[i * k + j] = v / l[j * k + j];
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    Real v = Real(rhs[i]) * scale[i];
    for (std::size_t q = 0; q < i; ++q) v -= l[i * k + q] * y[q];
    y[i] = v / l[i * k + i];
  }
  for (std::size_t i = k; i-- > 0;) {
    Real v = y[i];
    for (std::size_t q = i + 1; q < k; ++q) v -= l[q * k + i] * out[q];
    out[i] = v / l[i * k + i];
  }
  Vector result(k);
  for (std::size_t i = 0; i < k; ++i) result[i] = static_cast<double>(out[i] * scale[i]);
  return result;
}

double dual_entry(const Vector& y, std::size_t n, std::size_t m, std::size_t i, std::size_t j) {
  return y[i] + (j + 1 < m ? y[n + j] : 0.0);
}

// Maximum-weight spanning tree of x over the bipartite row/column graph and
// the unique tree solution for the given weights: a vertex near x.
struct TreeBasis {
  Matrix flows;
  bool nonnegative = true;
};

TreeBasis tree_basis(const Matrix& x, std::span<const double> ws, std::span<const double> wt) {
  const std::size_t n = x.rows(), m = x.cols();
  std::vector<std::size_t> order(n * m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t p, std::size_t q) { return x.data()[p] > x.data()[q]; });
  std::vector<std::size_t> parent(n + m);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  std::vector<std::vector<std::size_t>> adj(n + m);
  std::size_t edges = 0;
  for (std::size_t e : order) {
    const std::size_t a = e / m, b = n + e % m;
    const std::size_t ra = find(a), rb = find(b);
    if (ra == rb) continue;
    parent[ra] = rb;
    adj[a].push_back(b);
    adj[b].push_back(a);
    if (++edges == n + m - 1) break;
  }
  auto cell = [&](std::size_t p, std::size_t q) -> std::pair<std::size_t, std::size_t> {
    return p < n ? std::pair{p, q - n} : std::pair{q, p - n};
  };

  TreeBasis out;
  std::vector<std::size_t> queue{0}, up(n + m, n + m);
  std::vector<bool> seen(n + m, false);
  seen[0] = true;
  for (std::size_t h = 0; h < queue.size(); ++h) {
    const std::size_t node = queue[h];
    for (std::size_t other : adj[node]) {
      if (seen[other]) continue;
      seen[other] = true;
      up[other] = node;
      queue.push_back(other);
    }
  }
  // Flows by peeling from the leaves of the BFS order towards the root.
  Vector excess(n + m);
  for (std::size_t a = 0; a < n; ++a) excess[a] = ws[a];
  for (std::size_t b = 0; b < m; ++b) excess[n + b] = wt[b];
  out.flows = Matrix(n, m);
  for (std::size_t h = queue.size(); h-- > 1;) {
    const std::size_t node = queue[h];
    const auto [a, b] = cell(node, up[node]);
    const double f = excess[node];
    out.flows(a, b) = std::max(f, 0.0);
    excess[up[node]] -= f;
    if (f < -1e-14) out.nonnegative = false;
  }
  return out;
}

// Optimal potentials for a candidate plan by Bellman-Ford on the residual
// graph: row a -> column b at cost c_ab, and column b -> row a at cost -c_ab
// where the plan is positive. Distances give u_a = -dist_a, v_b = dist_b with
// u_a + v_b <= c_ab everywhere and equality on the support. Returns nothing
// when the relaxation does not settle, i.e. the plan is not optimal.
std::optional<Vector> support_potentials(const Matrix& plan, const Matrix& c) {
  const std::size_t n = c.rows(), m = c.cols();
  const double slack = 1e-13 * (1.0 + c.max_abs());
  Vector dist(n + m, 0.0);
  for (std::size_t round = 0; round <= n + m; ++round) {
    bool changed = false;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < m; ++b) {
        if (dist[a] + c(a, b) < dist[n + b] - slack) {
          dist[n + b] = dist[a] + c(a, b);
          changed = true;
        }
        if (plan(a, b) > 0.0 && dist[n + b] - c(a, b) < dist[a] - slack) {
          dist[a] = dist[n + b] - c(a, b);
          changed = true;
        }
      }
    if (!changed) {
      Vector u(n);
      for (std::size_t a = 0; a < n; ++a) u[a] = -dist[a];
      return u;
    }
  }
  return std::nullopt;
}

// Dual objective after lowering the column potentials until u_a + v_b <= c_ab
// holds everywhere: a valid lower bound on the optimum for any row potentials.
double repaired_dual(std::span<const double> u, const Matrix& c, std::span<const double> ws,
                     std::span<const double> wt) {
  Vector terms;
  terms.reserve(c.rows() + c.cols());
  for (std::size_t a = 0; a < c.rows(); ++a) terms.push_back(ws[a] * u[a]);
  for (std::size_t b = 0; b < c.cols(); ++b) {
    double v = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < c.rows(); ++a) v = std::min(v, c(a, b) - u[a]);
    terms.push_back(wt[b] * v);
  }
  return pairwise_sum(terms);
}

}  // namespace

DikinResult solve_dikin(const CostMatrix& cost, std::span<const double> w_source, std::span<const double> w_target,
                        const DikinOptions& options) {
  const std::size_t n = cost.rows();
  const std::size_t m = cost.cols();
  if (n == 0 || m == 0) throw InputError("transport: empty cost matrix");
  validate_weights(w_source, w_target, n, m);
  if (!(options.tol > 0.0)) throw InputError("solve_dikin: tol must be positive");
  if (!(options.step_fraction > 0.0 && options.step_fraction < 1.0))
    throw InputError("solve_dikin: step fraction must lie in (0, 1)");
  if (!(options.gap_tol >= 0.0)) throw InputError("solve_dikin: gap_tol must be nonnegative");
  for (double c : cost.entries.data())
    if (!std::isfinite(c)) throw InputError("transport: non-finite cost entry");

  DikinResult result;
  result.plan.source_weights.assign(w_source.begin(), w_source.end());
  result.plan.target_weights.assign(w_target.begin(), w_target.end());

  // Zero-weight rows and columns carry no mass; solve on the positive block.
  std::vector<std::size_t> rows, cols;
  for (std::size_t i = 0; i < n; ++i)
    if (w_source[i] > 0.0) rows.push_back(i);
  for (std::size_t j = 0; j < m; ++j)
    if (w_target[j] > 0.0) cols.push_back(j);
  const std::size_t nr = rows.size();
  const std::size_t nc = cols.size();
  Vector ws(nr), wt(nc);
  Matrix c(nr, nc);
  for (std::size_t a = 0; a < nr; ++a) ws[a] = w_source[rows[a]];
  for (std::size_t b = 0; b < nc; ++b) wt[b] = w_target[cols[b]];
  for (std::size_t a = 0; a < nr; ++a)
    for (std::size_t b = 0; b < nc; ++b) c(a, b) = cost.entries(rows[a], cols[b]);

  Matrix x(nr, nc);
  for (std::size_t a = 0; a < nr; ++a)
    for (std::size_t b = 0; b < nc; ++b) x(a, b) = ws[a] * wt[b];

  auto scatter = [&] {
    result.plan.gamma = Matrix(n, m);
    for (std::size_t a = 0; a < nr; ++a)
      for (std::size_t b = 0; b < nc; ++b) result.plan.gamma(rows[a], cols[b]) = x(a, b);
    result.plan.cost = plan_cost(result.plan.gamma, cost.entries);
    result.marginal_residual = result.plan.marginal_violation();
  };

  if (nr == 1 || nc == 1) {
    result.converged = true;
    scatter();
    return result;
  }

  auto max_residual = [&](const Matrix& p) {
    double worst = 0.0;
    for (double r : constraint_residual(p, ws, wt)) worst = std::max(worst, std::abs(r));
    return worst;
  };

  // Best primal feasible iterate by certified duality gap.
  std::optional<Matrix> best;
  double best_gap = std::numeric_limits<double>::infinity();
  const double tiny = std::numeric_limits<double>::min();
  try {
    for (std::size_t iter = 1; iter <= options.max_iter; ++iter) {
      result.iterations = iter;
      Matrix d(nr, nc);
      for (std::size_t k = 0; k < d.data().size(); ++k) d.data()[k] = x.data()[k] * x.data()[k];

      // Dual estimate y = (A D^2 A^T)^-1 A D^2 c and reduced costs r = c - A^T y.
      Vector rhs(nr + nc - 1, 0.0);
      for (std::size_t a = 0; a < nr; ++a)
        for (std::size_t b = 0; b < nc; ++b) {
          const double dc = d(a, b) * c(a, b);
          rhs[a] += dc;
          if (b + 1 < nc) rhs[nr + b] += dc;
        }
      const Vector y = scaled_solve(normal_matrix(d), rhs);

      Matrix step(nr, nc);
      double max_ratio = 0.0;
      for (std::size_t a = 0; a < nr; ++a)
        for (std::size_t b = 0; b < nc; ++b) {
          step(a, b) = -d(a, b) * (c(a, b) - dual_entry(y, nr, nc, a, b));
          if (step(a, b) < 0.0) max_ratio = std::max(max_ratio, -step(a, b) / x(a, b));
        }

      // Certified relative gap against the repaired normal-equation duals.
      const double cost_now = plan_cost(x, c);
      const double scale = 1.0 + std::abs(cost_now);
      double lower = repaired_dual(std::span<const double>(y.data(), nr), c, ws, wt);
      if ((cost_now - lower) / scale < 1e-3) {
        // Basis identification: round x to the vertex of its heaviest spanning
        // tree and certify that vertex with potentials built on its support.
        TreeBasis tree = tree_basis(x, ws, wt);
        const double tree_cost = plan_cost(tree.flows, c);
        if (tree.nonnegative && tree_cost <= cost_now) {
          if (const auto u = support_potentials(tree.flows, c)) {
            const double tree_gap = (tree_cost - repaired_dual(*u, c, ws, wt)) / scale;
            if (tree_gap <= options.tol) {
              best = std::move(tree.flows);
              best_gap = std::max(tree_gap, 0.0);
              result.converged = true;
              break;
            }
          }
        }
      }
      const double gap = (cost_now - lower) / scale;
      if (max_residual(x) <= 1e-10 && gap < best_gap) {
        best = x;
        best_gap = gap;
        if (gap <= options.tol) {
          result.converged = true;
          break;
        }
      }
      if (max_ratio <= tiny) break;

      const double alpha = options.step_fraction / max_ratio;
      for (std::size_t k = 0; k < x.data().size(); ++k) x.data()[k] += alpha * step.data()[k];

      // Pull the iterate back onto the constraint set when rounding drifts it.
      const Vector residual = constraint_residual(x, ws, wt);
      double worst = 0.0;
      for (double r : residual) worst = std::max(worst, std::abs(r));
      if (worst > 1e-14) {
        for (std::size_t k = 0; k < d.data().size(); ++k) d.data()[k] = x.data()[k] * x.data()[k];
        const Vector z = scaled_solve(normal_matrix(d), residual);
        bool positive = true;
        Matrix corrected = x;
        for (std::size_t a = 0; a < nr; ++a)
          for (std::size_t b = 0; b < nc; ++b) {
            corrected(a, b) += d(a, b) * dual_entry(z, nr, nc, a, b);
            positive = positive && corrected(a, b) > 0.0;
          }
        if (positive) x = std::move(corrected);
      }
      // Near a degenerate vertex the normal equations lose accuracy and the
      // iterate drifts off the constraints; stop at the best certified point.
      if (max_residual(x) > 1e-9) break;
    }
  } catch (const NumericalError&) {
    // Same breakdown, detected inside the factorization.
  }

  if (!result.converged && best && best_gap <= options.gap_tol) {
    result.converged = true;
    result.diagnostic = "stopped at working precision with certified relative gap " + std::to_string(best_gap);
  }
  if (best) x = std::move(*best);
  result.certified_gap = best_gap;
  scatter();
  if (!result.converged)
    result.diagnostic = "affine scaling stopped after " + std::to_string(result.iterations) +
                        " iterations without meeting the tolerance";
  return result;
}

double duality_gap(const TransportPlan& plan, const DualPotentials& potentials, const CostMatrix& cost,
                   std::span<const double> w_source, std::span<const double> w_target) {
  const std::size_t n = cost.rows();
  const std::size_t m = cost.cols();
  if (plan.gamma.rows() != n || plan.gamma.cols() != m || potentials.u.size() != n || potentials.v.size() != m)
    throw InputError("duality_gap: dimensions are inconsistent");
  validate_weights(w_source, w_target, n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (potentials.u[i] + potentials.v[j] > cost.entries(i, j) + 1e-9)
        throw InputError("duality_gap: potentials are not dual feasible");
  Vector dual_terms;
  dual_terms.reserve(n + m);
  for (std::size_t i = 0; i < n; ++i) dual_terms.push_back(potentials.u[i] * w_source[i]);
  for (std::size_t j = 0; j < m; ++j) dual_terms.push_back(potentials.v[j] * w_target[j]);
  return plan_cost(plan.gamma, cost.entries) - pairwise_sum(dual_terms);
}

double complementary_slackness_violation(const TransportPlan& plan, const DualPotentials& potentials,
                                         const CostMatrix& cost) {
  double worst = 0.0;
  for (std::size_t i = 0; i < cost.rows(); ++i)
    for (std::size_t j = 0; j < cost.cols(); ++j)
      if (plan.gamma(i, j) > 0.0)
        worst = std::max(worst, std::abs(potentials.u[i] + potentials.v[j] - cost.entries(i, j)));
  return worst;
}

namespace {

// Union-find without path compression so unions can be rolled back.
class RollbackForest {
 public:
  explicit RollbackForest(std::size_t size) : parent_(size), rank_(size, 0) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  std::size_t find(std::size_t x) const {
    while (parent_[x] != x) x = parent_[x];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    history_.push_back({b, rank_[a] == rank_[b]});
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }
  void undo() {
    const auto [child, bumped] = history_.back();
    history_.pop_back();
    const std::size_t root = parent_[child];
    parent_[child] = child;
    if (bumped) --rank_[root];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<int> rank_;
  std::vector<std::pair<std::size_t, bool>> history_;
};

class BasisEnumerator {
 public:
  BasisEnumerator(const Matrix& cost, std::span<const double> ws, std::span<const double> wt)
      : cost_(cost), ws_(ws), wt_(wt), n_(cost.rows()), m_(cost.cols()), forest_(n_ + m_) {}

  double run() {
    chosen_.clear();
    recurse(0);
    if (!std::isfinite(best_)) throw NumericalError("brute_force_ot: no feasible basis found");
    return best_;
  }

 private:
  void recurse(std::size_t next_cell) {
    const std::size_t needed = n_ + m_ - 1;
    if (chosen_.size() == needed) {
      evaluate();
      return;
    }
    const std::size_t total = n_ * m_;
    for (std::size_t cell = next_cell; cell + (needed - chosen_.size()) <= total; ++cell) {
      const std::size_t i = cell / m_;
      const std::size_t j = cell % m_;
      if (!forest_.unite(i, n_ + j)) continue;
      chosen_.push_back(cell);
      recurse(cell + 1);
      chosen_.pop_back();
      forest_.undo();
    }
  }

  // Solves the tree equations for the flows; keeps the cost if feasible.
  void evaluate() {
    const std::size_t nodes = n_ + m_;
    std::vector<double> remaining(nodes);
    for (std::size_t i = 0; i < n_; ++i) remaining[i] = ws_[i];
    for (std::size_t j = 0; j < m_; ++j) remaining[n_ + j] = wt_[j];
    std::vector<std::size_t> degree(nodes, 0);
    for (std::size_t cell : chosen_) {
      ++degree[cell / m_];
      ++degree[n_ + cell % m_];
    }
    std::vector<bool> used(chosen_.size(), false);
    double total = 0.0;
    for (std::size_t done = 0; done < chosen_.size(); ++done) {
      bool progressed = false;
      for (std::size_t e = 0; e < chosen_.size() && !progressed; ++e) {
        if (used[e]) continue;
        const std::size_t row = chosen_[e] / m_;
        const std::size_t col = n_ + chosen_[e] % m_;
        std::size_t leaf = nodes, other = nodes;
        if (degree[row] == 1) {
          leaf = row;
          other = col;
        } else if (degree[col] == 1) {
          leaf = col;
          other = row;
        } else {
          continue;
        }
        const double flow = remaining[leaf];
        if (flow < -1e-12) return;
        total += std::max(0.0, flow) * cost_(row, col - n_);
        remaining[other] -= flow;
        remaining[leaf] = 0.0;
        --degree[leaf];
        --degree[other];
        used[e] = true;
        progressed = true;
      }
      if (!progressed) return;
    }
    best_ = std::min(best_, total);
  }

  const Matrix& cost_;
  std::span<const double> ws_, wt_;
  std::size_t n_, m_;
  RollbackForest forest_;
  std::vector<std::size_t> chosen_;
  double best_ = std::numeric_limits<double>::infinity();
};

}  // namespace

double brute_force_ot(const CostMatrix& cost, std::span<const double> w_source, std::span<const double> w_target) {
  const std::size_t n = cost.rows();
  const std::size_t m = cost.cols();
  if (n == 0 || m == 0) throw InputError("transport: empty cost matrix");
  if (n * m > 25) throw InputError("brute_force_ot: instance too large for enumeration (n*m > 25)");
  validate_weights(w_source, w_target, n, m);

  const bool uniform_square =
      n == m && std::all_of(w_source.begin(), w_source.end(),
                            [&](double w) { return std::abs(w - 1.0 / static_cast<double>(n)) < 1e-15; }) &&
      std::all_of(w_target.begin(), w_target.end(),
                  [&](double w) { return std::abs(w - 1.0 / static_cast<double>(m)) < 1e-15; });
  if (uniform_square) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += cost.entries(i, perm[i]);
      best = std::min(best, s / static_cast<double>(n));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
  }
  return BasisEnumerator(cost.entries, w_source, w_target).run();
}

double ot_1d_sorted(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("ot_1d_sorted: samples have different sizes");
  if (a.empty()) throw InputError("ot_1d_sorted: empty samples");
  Vector sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  Vector diffs(sa.size());
  for (std::size_t i = 0; i < sa.size(); ++i) diffs[i] = std::abs(sa[i] - sb[i]);
  return pairwise_sum(diffs) / static_cast<double>(sa.size());
}

void write_plan_csv(std::ostream& out, const TransportPlan& plan, const CostMatrix& cost, double threshold) {
  out << "i,j,gamma,cost_ij\n" << std::setprecision(17);
  for (std::size_t i = 0; i < plan.gamma.rows(); ++i)
    for (std::size_t j = 0; j < plan.gamma.cols(); ++j)
      if (plan.gamma(i, j) > threshold)
        out << i << ',' << j << ',' << plan.gamma(i, j) << ',' << cost.entries(i, j) << '\n';
}

}  // namespace mide::transport
