#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace biodose {

/// Adaptive Simpson quadrature with absolute+relative stopping rule.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol = 1e-9, int max_depth = 40);

/// Golden-section maximisation of a unimodal function on [a, b].
double golden_section_max(const std::function<double(double)>& f, double a, double b,
                          double tol);

/// Bisection root of f on [a, b]; requires a sign change.
double bisect_root(const std::function<double(double)>& f, double a, double b,
                   double tol = 1e-12, int max_iter = 200);

double trapezoid(std::span<const double> x, std::span<const double> y);

/// Central-difference first derivative with step h ~ eps^(1/3).
double central_derivative(const std::function<double(double)>& f, double x,
                          double scale = 1.0);

inline std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = a;
    return out;
  }
  const double h = (b - a) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = a + h * static_cast<double>(i);
  out.back() = b;
  return out;
}

}  // namespace biodose
