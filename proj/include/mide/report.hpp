#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "mide/estimator.hpp"
#include "mide/inference.hpp"

namespace mide::report {

// Shortest text that reads back to the same double.
std::string format_double(double value);
std::string format_vector(std::span<const double> values);

// Plain-text report with [section] headers and "key = value" lines, written
// in insertion order.
class KeyValueReport {
 public:
  void section(std::string name);
  void set(std::string key, std::string value);
  void set(std::string key, double value) { set(std::move(key), format_double(value)); }
  void set(std::string key, std::size_t value) { set(std::move(key), std::to_string(value)); }
  void set(std::string key, bool value) { set(std::move(key), std::string(value ? "true" : "false")); }
  std::string render() const;

 private:
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> sections_;
};

std::string estimation_report(const estimator::EstimationResult& result);
std::string trace_csv(const estimator::EstimationResult& result);
std::string test_report(const inference::TestReport& report);
// Histogram of the simulated null draws: bin_lo,bin_hi,count.
std::string null_hist_csv(const inference::NullDistribution& null, std::size_t bins = 50);

// Writes to a sibling temporary file and renames it into place, so a failed
// run never leaves a partial file behind.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace mide::report
