// SPDX-License-Identifier: Apache-2.0
/**
 * One-dimensional quadrature used by the nonlocal operators.
 *
 * gk15_adaptive is a globally adaptive Gauss-Kronrod 7/15 rule: intervals are
 * kept in a worst-first heap and bisected until the summed error estimate
 * meets max(abs_tol, rel_tol * |integral|) or the interval budget runs out.
 * gauss_panels is a fixed composite Gauss-Legendre rule for smooth factors.
 * Both are templates so that lambda integrands inline.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace starfrac {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
  long evals = 0;
};

/// Nodes/weights of the n-point Gauss-Legendre rule on [-1,1] (cached).
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int n);

namespace quad_detail {

// Kronrod-15 abscissae (positive half), Kronrod and embedded Gauss-7 weights.
inline constexpr double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Seg {
  double a, b, value, error;
  bool operator<(const Seg& o) const { return error < o.error; }
};

template <class F>
Seg gk15_once(F&& f, double a, double b, long& evals) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double resk = wgk[7] * fc;
  double resg = wg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double f1 = f(c - h * xgk[j]);
    const double f2 = f(c + h * xgk[j]);
    resk += wgk[j] * (f1 + f2);
    if (j % 2 == 1) resg += wg[j / 2] * (f1 + f2);
  }
  evals += 15;
  return {a, b, resk * h, std::abs((resk - resg) * h)};
}

}  // namespace quad_detail

template <class F>
QuadResult gk15_adaptive(F&& f, double a, double b, double rel_tol = 1e-9,
                         double abs_tol = 1e-13, int max_intervals = 4000) {
  QuadResult out;
  if (a == b) return out;
  std::priority_queue<quad_detail::Seg> heap;
  quad_detail::Seg first = quad_detail::gk15_once(f, a, b, out.evals);
  double total = first.value;
  double err = first.error;
  heap.push(first);
  int n = 1;
  while (err > std::max(abs_tol, rel_tol * std::abs(total)) && n < max_intervals) {
    const quad_detail::Seg worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {  // exhausted by rounding
      heap.push({worst.a, worst.b, worst.value, 0.0});
      err -= worst.error;
      continue;
    }
    const quad_detail::Seg l = quad_detail::gk15_once(f, worst.a, mid, out.evals);
    const quad_detail::Seg r = quad_detail::gk15_once(f, mid, worst.b, out.evals);
    total += l.value + r.value - worst.value;
    err += l.error + r.error - worst.error;
    heap.push(l);
    heap.push(r);
    ++n;
  }
  out.value = total;
  out.error = err;
  return out;
}

/// Composite n_panels x order Gauss-Legendre rule on [a,b].
template <class F>
double gauss_panels(F&& f, double a, double b, int n_panels, int order = 16) {
  const GaussRule& rule = gauss_legendre(order);
  const double w = (b - a) / n_panels;
  double sum = 0.0;
  for (int p = 0; p < n_panels; ++p) {
    const double c = a + (p + 0.5) * w;
    for (int q = 0; q < order; ++q)
      sum += rule.weights[q] * f(c + 0.5 * w * rule.nodes[q]);
  }
  return sum * 0.5 * w;
}

}  // namespace starfrac
