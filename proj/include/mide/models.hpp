#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mide/empirical.hpp"

namespace mide::models {

// eps = y - theta * x with scalar x, y.
empirical::ResidualModel linear();

// Linear separable supply and demand system with x = (z, w), y = (q, p),
// theta = (a, b, c, d):
//   eps_D = q - (a z + b p),   eps_S = p - (c w + d q).
empirical::ResidualModel supply_demand();

// Bivariate Gaussian design with x = (x1, x2) and y = (e1, eta), the stored
// standard normal draws:
//   eps1 = e1
//   eps2 = (1 - theta)(x2 + 0.5) + sqrt(1 - (1 - theta)^2) eta + 0.25 + theta.
// eps has mean (0, 0.25 + theta), unit variances, and corr(x2, eps2) = 1 - theta
// whenever x ~ N((0, -0.5), I). Defined for theta in [0, 2].
empirical::ResidualModel experiment52();

// Throws InputError for unknown names.
empirical::ResidualModel by_name(std::string_view name);
std::vector<std::string> names();

}  // namespace mide::models
