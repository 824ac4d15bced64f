#include "mide/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "mide/errors.hpp"

namespace mide::report {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw NumericalError("cannot format value");
  return std::string(buf, end);
}

std::string format_vector(std::span<const double> values) {
  std::string out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) out += ' ';
    out += format_double(values[k]);
  }
  return out;
}

void KeyValueReport::section(std::string name) { sections_.push_back({std::move(name), {}}); }

void KeyValueReport::set(std::string key, std::string value) {
  if (sections_.empty()) section("");
  sections_.back().second.emplace_back(std::move(key), std::move(value));
}

std::string KeyValueReport::render() const {
  std::ostringstream out;
  bool first = true;
  for (const auto& [name, entries] : sections_) {
    if (!first) out << '\n';
    first = false;
    if (!name.empty()) out << '[' << name << "]\n";
    for (const auto& [key, value] : entries) out << key << " = " << value << '\n';
  }
  return out.str();
}

namespace {

void kernel_section(KeyValueReport& r, const kernels::KernelSpec& spec) {
  r.section("kernel");
  r.set("family", std::string(kernels::to_string(spec.family)));
  r.set("sigma", spec.sigma);
  if (spec.family == kernels::Family::inverse_multiquadric) r.set("c", spec.c);
  r.set("bound", spec.bound());
}

}  // namespace

std::string estimation_report(const estimator::EstimationResult& result) {
  const auto& d = result.diagnostics;
  KeyValueReport r;
  r.section("result");
  r.set("theta_star", format_vector(result.theta_star));
  r.set("objective", std::string(estimator::to_string(d.objective)));
  r.set("objective_value", result.objective_value);
  r.set("problem", d.problem);
  kernel_section(r, d.kernel);
  r.set("median_heuristic", d.median_heuristic);

  r.section("search");
  r.set("evaluations", d.evaluations);
  r.set("iterations", d.iterations);
  r.set("converged", d.converged);
  if (d.scheme_rounds) r.set("scheme_rounds", d.scheme_rounds);

  if (d.kernel_statistic || d.accepted) {
    r.section("stopping_rule");
    if (d.kernel_statistic) r.set("s_hat", *d.kernel_statistic);
    if (d.scaled_statistic) r.set("n_s_hat", *d.scaled_statistic);
    if (d.null_quantile) r.set("null_quantile", *d.null_quantile);
    r.set("accepted", d.accepted ? std::string(*d.accepted ? "true" : "false") : std::string("unknown"));
  }

  if (result.plan) {
    const auto& plan = *result.plan;
    r.section("plan");
    r.set("rows", plan.gamma.rows());
    r.set("cols", plan.gamma.cols());
    r.set("cost", plan.cost);
    r.set("support", plan.support());
    r.set("marginal_violation", plan.marginal_violation());
    r.set("lp_pivots", d.lp_pivots);
    if (d.dikin_iterations) r.set("dikin_iterations", d.dikin_iterations);
    if (result.plan_marginals) {
      const auto& [dh, dp] = *result.plan_marginals;
      r.set("dH_sum", pairwise_sum(dh));
      r.set("dP_sum", pairwise_sum(dp));
      r.set("dH_max_over_min", *std::max_element(dh.begin(), dh.end()) / *std::min_element(dh.begin(), dh.end()));
      r.set("dP_max_over_min", *std::max_element(dp.begin(), dp.end()) / *std::min_element(dp.begin(), dp.end()));
    }
  }

  if (!d.messages.empty()) {
    r.section("messages");
    for (std::size_t k = 0; k < d.messages.size(); ++k) r.set("message." + std::to_string(k), d.messages[k]);
  }
  return r.render();
}

std::string trace_csv(const estimator::EstimationResult& result) {
  std::ostringstream out;
  const std::size_t dim = result.trace.empty() ? result.theta_star.size() : result.trace.front().theta.size();
  for (std::size_t c = 0; c < dim; ++c) out << "theta" << c + 1 << ',';
  out << "value\n";
  for (const auto& e : result.trace) {
    for (double t : e.theta) out << format_double(t) << ',';
    out << format_double(e.value) << '\n';
  }
  return out.str();
}

std::string test_report(const inference::TestReport& t) {
  KeyValueReport r;
  r.section("test");
  r.set("method", std::string(inference::to_string(t.method)));
  r.set("n", t.n);
  r.set("statistic", t.statistic);
  r.set("s_hat", t.s_hat);
  r.set("p_value", t.p_value);
  r.set("sigma_s2", t.sigma_s2);
  r.set("seed", std::to_string(t.seed));
  r.set("draws", t.draws);
  kernel_section(r, t.kernel);
  if (t.spectrum_size) {
    r.section("spectrum");
    r.set("size", t.spectrum_size);
    r.set("truncation_error", t.truncation_error);
  }
  if (!t.null_quantiles.empty()) {
    r.section("null_quantiles");
    for (const auto& [p, q] : t.null_quantiles) r.set("q" + format_double(p), q);
  }
  return r.render();
}

std::string null_hist_csv(const inference::NullDistribution& null, std::size_t bins) {
  std::ostringstream out;
  out << "bin_lo,bin_hi,count\n";
  if (null.draws.empty() || bins == 0) return out.str();
  const double lo = null.draws.front();
  double hi = null.draws.back();
  if (hi <= lo) hi = lo + 1.0;
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<std::size_t> counts(bins, 0);
  for (double v : null.draws) {
    auto b = static_cast<std::size_t>((v - lo) / width);
    ++counts[std::min(b, bins - 1)];
  }
  for (std::size_t b = 0; b < bins; ++b)
    out << format_double(lo + width * b) << ',' << format_double(lo + width * (b + 1)) << ',' << counts[b] << '\n';
  return out.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw InputError("failed writing " + path.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace mide::report
