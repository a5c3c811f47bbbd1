// SPDX-License-Identifier: Apache-2.0
#include "starfrac/test_function.hpp"

#include <cmath>
#include <stdexcept>

namespace starfrac {

TestFunction TestFunction::interval_bump(double mid, double halfwidth) {
  return disk_bump({mid, 0.0}, halfwidth);
}

TestFunction TestFunction::disk_bump(const Vec2& center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("bump requires radius > 0");
  TestFunction f;
  f.kind_ = Kind::Bump;
  f.center_ = center;
  f.r_ = radius;
  return f;
}

TestFunction TestFunction::compact_bump(const Vec2& center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("bump requires radius > 0");
  TestFunction f;
  f.kind_ = Kind::Compact;
  f.center_ = center;
  f.r_ = radius;
  return f;
}

TestFunction TestFunction::flat_top(const Vec2& center, double r_in, double r_out) {
  if (!(0.0 < r_in && r_in < r_out))
    throw std::invalid_argument("flat_top requires 0 < r_in < r_out");
  TestFunction f;
  f.kind_ = Kind::FlatTop;
  f.center_ = center;
  f.r_in_ = r_in;
  f.r_ = r_out;
  return f;
}

TestFunction TestFunction::times_polynomial(const Poly2& p) const {
  if (has_poly_)
    throw std::logic_error("only one polynomial factor is supported");
  TestFunction f = *this;
  f.has_poly_ = true;
  f.poly_ = p;
  return f;
}

TestFunction TestFunction::with_time_decay(double T) const {
  if (!(T > 0.0)) throw std::invalid_argument("time decay requires T > 0");
  TestFunction f = *this;
  f.time_T_ = T;
  return f;
}

void TestFunction::radial_s(double s, double& g, double& gp, double& gpp) const {
  const double r2 = r_ * r_;
  if (s >= r2) {
    g = gp = gpp = 0.0;
    return;
  }
  if (kind_ == Kind::Bump) {
    const double u = 1.0 - s / r2;
    g = u * u;
    gp = -2.0 * u / r2;
    gpp = 2.0 / (r2 * r2);
    return;
  }
  // Compact: exp(1 - 1/q), q = 1 - s/r^2.
  const double q = 1.0 - s / r2;
  g = std::exp(1.0 - 1.0 / q);
  const double q2 = q * q;
  gp = -g / (q2 * r2);
  gpp = g * (1.0 - 2.0 * q) / (q2 * q2 * r2 * r2);
}

void TestFunction::radial_rho(double rho, double& f, double& fp, double& fpp) const {
  if (rho <= r_in_) {
    f = 1.0;
    fp = fpp = 0.0;
    return;
  }
  if (rho >= r_) {
    f = fp = fpp = 0.0;
    return;
  }
  // F(rho) = logistic(w(t)), t = (r_out - rho)/(r_out - r_in),
  // w(t) = -1/t + 1/(1-t); all derivatives vanish at both edges.
  const double span = r_ - r_in_;
  const double t = (r_ - rho) / span;
  const double omt = 1.0 - t;
  const double w = -1.0 / t + 1.0 / omt;
  const double sig = 1.0 / (1.0 + std::exp(-w));
  const double wp = 1.0 / (t * t) + 1.0 / (omt * omt);
  const double wpp = -2.0 / (t * t * t) + 2.0 / (omt * omt * omt);
  const double sp = sig * (1.0 - sig);
  const double s_t = sp * wp;                                  // dS/dt
  const double s_tt = sp * (1.0 - 2.0 * sig) * wp * wp + sp * wpp;
  f = sig;
  fp = -s_t / span;          // dt/drho = -1/span
  fpp = s_tt / (span * span);
}

double TestFunction::value(const Vec2& x) const {
  const Vec2 d = x - center_;
  double base;
  if (kind_ == Kind::FlatTop) {
    double f, fp, fpp;
    radial_rho(d.norm(), f, fp, fpp);
    base = f;
  } else {
    double g, gp, gpp;
    radial_s(d.norm2(), g, gp, gpp);
    base = g;
  }
  return has_poly_ ? base * poly_.value(x) : base;
}

Vec2 TestFunction::gradient(const Vec2& x) const {
  const Vec2 d = x - center_;
  Vec2 gb;
  double base;
  if (kind_ == Kind::FlatTop) {
    const double rho = d.norm();
    double f, fp, fpp;
    radial_rho(rho, f, fp, fpp);
    base = f;
    gb = rho > 0.0 ? (fp / rho) * d : Vec2{0.0, 0.0};
  } else {
    double g, gp, gpp;
    radial_s(d.norm2(), g, gp, gpp);
    base = g;
    gb = 2.0 * gp * d;
  }
  if (!has_poly_) return gb;
  return poly_.value(x) * gb + base * poly_.gradient(x);
}

Hess TestFunction::hessian(const Vec2& x) const {
  const Vec2 d = x - center_;
  Hess hb;
  Vec2 gb;
  double base;
  if (kind_ == Kind::FlatTop) {
    const double rho = d.norm();
    double f, fp, fpp;
    radial_rho(rho, f, fp, fpp);
    base = f;
    if (rho > 0.0) {
      const Vec2 n = (1.0 / rho) * d;
      gb = fp * n;
      const double t = fp / rho;
      hb.xx = fpp * n.x * n.x + t * (1.0 - n.x * n.x);
      hb.xy = (fpp - t) * n.x * n.y;
      hb.yy = fpp * n.y * n.y + t * (1.0 - n.y * n.y);
    }
  } else {
    double g, gp, gpp;
    radial_s(d.norm2(), g, gp, gpp);
    base = g;
    gb = 2.0 * gp * d;
    hb.xx = 2.0 * gp + 4.0 * gpp * d.x * d.x;
    hb.xy = 4.0 * gpp * d.x * d.y;
    hb.yy = 2.0 * gp + 4.0 * gpp * d.y * d.y;
  }
  if (!has_poly_) return hb;
  const double pv = poly_.value(x);
  const Vec2 pg = poly_.gradient(x);
  const Hess ph = poly_.hessian();
  Hess h;
  h.xx = pv * hb.xx + 2.0 * pg.x * gb.x + base * ph.xx;
  h.xy = pv * hb.xy + pg.x * gb.y + pg.y * gb.x + base * ph.xy;
  h.yy = pv * hb.yy + 2.0 * pg.y * gb.y + base * ph.yy;
  return h;
}

double TestFunction::time_weight(double t) const {
  if (time_T_ <= 0.0) return 1.0;
  const double u = 1.0 - t / time_T_;
  return u > 0.0 ? u * u : 0.0;
}

double TestFunction::time_weight_dt(double t) const {
  if (time_T_ <= 0.0) return 0.0;
  const double u = 1.0 - t / time_T_;
  return u > 0.0 ? -2.0 * u / time_T_ : 0.0;
}

}  // namespace starfrac
