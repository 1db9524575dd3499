#pragma once

// Adaptive Simpson quadrature with an absolute error target.

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace hsaw {

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QuadratureOptions {
  double abs_tol = 1e-10;
  int max_depth = 60;
  long max_evaluations = 50'000'000;
};

namespace detail {

template <typename F>
struct SimpsonState {
  F& f;
  const QuadratureOptions& opt;
  long evaluations = 0;
  double worst_a = 0, worst_b = 0;
  bool failed = false;

  double eval(double x) {
    ++evaluations;
    return f(x);
  }

  double recurse(double a, double b, double fa, double fm, double fb, double whole, double tol,
                 int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = eval(lm);
    const double frm = eval(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth <= 0 || evaluations > opt.max_evaluations || !(std::abs(delta) < INFINITY)) {
      if (!failed) {
        failed = true;
        worst_a = a;
        worst_b = b;
      }
      return left + right + delta / 15.0;
    }
    return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
  }
};

}  // namespace detail

/// Integral of f over [a, b] to absolute tolerance opt.abs_tol. Throws
/// QuadratureError (with the offending subinterval) when the recursion
/// depth or evaluation budget is exhausted.
template <typename F>
double adaptive_simpson(F&& f, double a, double b, const QuadratureOptions& opt = {}) {
  if (!(opt.abs_tol > 0)) throw std::invalid_argument("quadrature tolerance must be positive");
  if (a == b) return 0.0;
  if (a > b) return -adaptive_simpson(f, b, a, opt);
  detail::SimpsonState<F> st{f, opt};
  const double fa = st.eval(a);
  const double fb = st.eval(b);
  const double fm = st.eval(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double result = st.recurse(a, b, fa, fm, fb, whole, opt.abs_tol, opt.max_depth);
  if (st.failed) {
    std::ostringstream msg;
    msg << "adaptive Simpson did not converge on [" << a << ", " << b << "]: first failing interval ["
        << st.worst_a << ", " << st.worst_b << "], " << st.evaluations << " evaluations, tol "
        << opt.abs_tol;
    throw QuadratureError(msg.str());
  }
  return result;
}

}  // namespace hsaw
