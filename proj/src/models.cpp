#include "mide/models.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mide/errors.hpp"

namespace mide::models {

empirical::ResidualModel linear() {
  return {"linear", 1, 1, 1, 1,
          [](std::span<const double> x, std::span<const double> y, std::span<const double> theta) {
            return Vector{y[0] - theta[0] * x[0]};
          }};
}

empirical::ResidualModel supply_demand() {
  return {"supply_demand", 4, 2, 2, 2,
          [](std::span<const double> x, std::span<const double> y, std::span<const double> theta) {
            const double z = x[0], w = x[1], q = y[0], p = y[1];
            return Vector{q - (theta[0] * z + theta[1] * p), p - (theta[2] * w + theta[3] * q)};
          }};
}

empirical::ResidualModel experiment52() {
  return {"experiment52", 1, 2, 2, 2,
          [](std::span<const double> x, std::span<const double> y, std::span<const double> theta) {
            const double t = theta[0];
            const double r = 1.0 - t;
            const double spread = 1.0 - r * r;
            if (spread < 0.0) return Vector{y[0], std::numeric_limits<double>::quiet_NaN()};
            return Vector{y[0], r * (x[1] + 0.5) + std::sqrt(spread) * y[1] + 0.25 + t};
          }};
}

empirical::ResidualModel by_name(std::string_view name) {
  if (name == "linear") return linear();
  if (name == "supply_demand") return supply_demand();
  if (name == "experiment52") return experiment52();
  throw InputError("unknown model '" + std::string(name) + "'");
}

std::vector<std::string> names() { return {"linear", "supply_demand", "experiment52"}; }

}  // namespace mide::models
