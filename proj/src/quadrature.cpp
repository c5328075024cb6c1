#include "seqreg/quadrature.hpp"

#include <cmath>

#include "seqreg/errors.hpp"

namespace seqreg {

namespace {

struct SimpsonState {
  const Integrand& f;
  std::size_t evals = 0;
  std::size_t max_eval;

  double eval(double x) {
    if (++evals > max_eval) {
      throw QuadratureFailure("adaptive_simpson: evaluation cap exceeded");
    }
    return f(x);
  }
};

double simpson(double fa, double fm, double fb, double h) {
  return (fa + 4.0 * fm + fb) * h / 6.0;
}

double adapt(SimpsonState& st, double a, double b, double fa, double fm, double fb,
             double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = st.eval(lm);
  const double frm = st.eval(rm);
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  if (depth > 60 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adapt(st, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
         adapt(st, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace

double adaptive_simpson(const Integrand& f, double a, double b, double tol,
                        std::size_t max_eval) {
  if (a == b) return 0.0;
  SimpsonState st{f, 0, max_eval};
  const double fa = st.eval(a);
  const double m = 0.5 * (a + b);
  const double fm = st.eval(m);
  const double fb = st.eval(b);
  const double whole = simpson(fa, fm, fb, b - a);
  return adapt(st, a, b, fa, fm, fb, whole, tol, 0);
}

double periodic_trapezoid(const Integrand& f, double period, double rel_tol,
                          std::size_t n0, std::size_t max_points) {
  // On a full period the trapezoid rule equals the midpoint-free uniform
  // sum; doubling reuses previous nodes.
  std::size_t n = n0;
  double h = period / static_cast<double>(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += f(h * static_cast<double>(i));
  double prev = sum * h;
  while (n <= max_points) {
    double odd = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      odd += f(h * (static_cast<double>(i) + 0.5));
    }
    n *= 2;
    h *= 0.5;
    sum += odd;
    const double cur = sum * h;
    if (std::abs(cur - prev) <= rel_tol * std::abs(cur)) return cur;
    prev = cur;
  }
  throw QuadratureFailure("periodic_trapezoid: did not converge within point cap");
}

}  // namespace seqreg
