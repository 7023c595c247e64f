#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

namespace testsupport {

/// log of the integral over (0, 1) of exp(log_f(log t, log(1 - t))).
///
/// Tanh-sinh rule; both logs are passed so integrands with endpoint
/// behaviour like t^a (1 - t)^b keep full relative accuracy near 0 and 1.
inline double tanh_sinh_log_integral(const std::function<double(double, double)>& log_f, double h = 1.0 / 128.0,
                                     double s_max = 4.5) {
  std::vector<double> terms;
  const int steps = static_cast<int>(s_max / h);
  terms.reserve(2 * steps + 1);
  for (int k = -steps; k <= steps; ++k) {
    const double s = k * h;
    const double v = std::numbers::pi / 2.0 * std::sinh(s);
    // t = 1 / (1 + exp(-2v)), 1 - t = 1 / (1 + exp(2v))
    const double log_t = -std::log1p(std::exp(-2.0 * v));
    const double log_1mt = -std::log1p(std::exp(2.0 * v));
    if (!std::isfinite(log_t) || !std::isfinite(log_1mt)) continue;
    // dt/ds = (pi/2) cosh(s) / (2 cosh^2(v))
    const double log_w = std::log(h * std::numbers::pi / 4.0 * std::cosh(s)) - 2.0 * std::log(std::cosh(v));
    const double lf = log_f(log_t, log_1mt);
    if (lf == -std::numeric_limits<double>::infinity()) continue;
    terms.push_back(lf + log_w);
  }
  const double mx = *std::max_element(terms.begin(), terms.end());
  double sum = 0.0;
  for (double x : terms) sum += std::exp(x - mx);
  return mx + std::log(sum);
}

/// log of the integral over (0, inf) of exp(log_f(x)), through x = t / (1 - t).
inline double half_line_log_integral(const std::function<double(double)>& log_f) {
  return tanh_sinh_log_integral([&](double log_t, double log_1mt) {
    const double x = std::exp(log_t - log_1mt);
    return log_f(x) - 2.0 * log_1mt;
  });
}

/// log of the trapezoid sum of exp(log_f(u)) over the grid [-width, width]^dim
/// with spacing h. For smooth integrands decaying well inside the box the
/// rule converges geometrically.
inline double trapezoid_log_integral(const std::function<double(const std::vector<double>&)>& log_f, int dim,
                                     double width = 12.0, double h = 0.125) {
  const int per_axis = static_cast<int>(std::lround(2.0 * width / h)) + 1;
  std::vector<int> idx(dim, 0);
  std::vector<double> u(dim);
  std::vector<double> terms;
  for (;;) {
    for (int k = 0; k < dim; ++k) u[k] = -width + h * idx[k];
    terms.push_back(log_f(u));
    int k = 0;
    while (k < dim && ++idx[k] == per_axis) idx[k++] = 0;
    if (k == dim) break;
  }
  const double mx = *std::max_element(terms.begin(), terms.end());
  double sum = 0.0;
  for (double x : terms) sum += std::exp(x - mx);
  return mx + std::log(sum) + dim * std::log(h);
}

}  // namespace testsupport
