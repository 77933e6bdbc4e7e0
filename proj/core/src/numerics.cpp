#include "biodose/numerics.hpp"

#include <cmath>

#include "biodose/accum.hpp"
#include "biodose/errors.hpp"

namespace biodose {
namespace {

double simpson(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double b, double fa, double fm,
             double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol, int max_depth) {
  if (!(b > a)) return 0.0;
  // seed with a coarse scan so narrow features are not missed
  const int n0 = 32;
  KahanSum coarse;
  double prev = f(a);
  double maxabs = std::abs(prev);
  const double h = (b - a) / n0;
  for (int i = 1; i <= n0; ++i) {
    const double x = a + h * i;
    const double fx = f(x);
    maxabs = std::max(maxabs, std::abs(fx));
    coarse.add(0.5 * h * (prev + fx));
    prev = fx;
  }
  const double scale = std::max(std::abs(coarse.value()), maxabs * (b - a) / n0);
  const double tol = std::max(rel_tol * scale, 1e-300);
  KahanSum total;
  for (int i = 0; i < n0; ++i) {
    const double x0 = a + h * i, x1 = a + h * (i + 1);
    const double fa = f(x0), fb = f(x1), fm = f(0.5 * (x0 + x1));
    const double whole = simpson(fa, fm, fb, x1 - x0);
    total.add(adapt(f, x0, x1, fa, fm, fb, whole, tol / n0, max_depth));
  }
  return total.value();
}

double golden_section_max(const std::function<double(double)>& f, double a, double b,
                          double tol) {
  constexpr double invphi = 0.6180339887498949;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

double bisect_root(const std::function<double(double)>& f, double a, double b, double tol,
                   int max_iter) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0.0) throw NumericError("bisect_root: no sign change on the bracket");
  for (int i = 0; i < max_iter && b - a > tol; ++i) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0) return m;
    if (fa * fm < 0.0) {
      b = m;
      fb = fm;
    } else {
      a = m;
      fa = fm;
    }
  }
  return 0.5 * (a + b);
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
  KahanSum s;
  for (std::size_t i = 1; i < x.size(); ++i)
    s.add(0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]));
  return s.value();
}

double central_derivative(const std::function<double(double)>& f, double x, double scale) {
  const double h = 1e-6 * std::max(1.0, std::abs(x)) * scale;
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace biodose
