#pragma once

#include <cmath>

namespace pafnet::special {

// Rational Chebyshev approximations for erf/erfc/erfcx after W. J. Cody,
// Math. Comp. 23 (1969), 631-638 (the CALERF scheme). Accurate to ~1e-16
// relative in double precision, far inside the 1.5e-7 budget documented
// for the expression engine's erfc primitive.

namespace detail {

enum class ErfKind { Erf, Erfc, Erfcx };

inline double calerf(double x, ErfKind kind) {
  static constexpr double a[5] = {3.1611237438705656, 113.864154151050156,
                                  377.485237685302021, 3209.37758913846947,
                                  0.185777706184603153};
  static constexpr double b[4] = {23.6012909523441209, 244.024637934444173,
                                  1282.61652607737228, 2844.23683343917062};
  static constexpr double c[9] = {
      0.564188496988670089, 8.88314979438837594, 66.1191906371416295,
      298.635138197400131,  881.95222124176909,  1712.04761263407058,
      2051.07837782607147,  1230.33935479799725, 2.15311535474403846e-8};
  static constexpr double d[8] = {15.7449261107098347, 117.693950891312499,
                                  537.181101862009858, 1621.38957456669019,
                                  3290.79923573345963, 4362.61909014324716,
                                  3439.36767414372164, 1230.33935480374942};
  static constexpr double p[6] = {0.305326634961232344,  0.360344899949804439,
                                  0.125781726111229246,  0.0160837851487422766,
                                  6.58749161529837803e-4, 0.0163153871373020978};
  static constexpr double q[5] = {2.56852019228982242, 1.87295284992346047,
                                  0.527905102951428412, 0.0605183413124413191,
                                  0.00233520497626869185};

  constexpr double sqrpi = 0.56418958354775628695;  // 1/sqrt(pi)
  constexpr double thresh = 0.46875;
  constexpr double xinf = 1.79e308;
  constexpr double xneg = -26.628;
  constexpr double xsmall = 1.11e-16;
  constexpr double xbig = 26.543;
  constexpr double xhuge = 6.71e7;
  constexpr double xmax = 2.53e307;

  const double y = std::fabs(x);
  double result = 0.0;

  if (y <= thresh) {
    // erf on [-thresh, thresh]
    double ysq = (y > xsmall) ? y * y : 0.0;
    double xnum = a[4] * ysq;
    double xden = ysq;
    for (int i = 0; i < 3; ++i) {
      xnum = (xnum + a[i]) * ysq;
      xden = (xden + b[i]) * ysq;
    }
    result = x * (xnum + a[3]) / (xden + b[3]);
    if (kind != ErfKind::Erf) result = 1.0 - result;
    if (kind == ErfKind::Erfcx) result = std::exp(ysq) * result;
    return result;
  }

  if (y <= 4.0) {
    // erfcx on (thresh, 4]
    double xnum = c[8] * y;
    double xden = y;
    for (int i = 0; i < 7; ++i) {
      xnum = (xnum + c[i]) * y;
      xden = (xden + d[i]) * y;
    }
    result = (xnum + c[7]) / (xden + d[7]);
    if (kind != ErfKind::Erfcx) {
      // split exp(-y^2) to preserve accuracy for large y
      const double ysq = std::trunc(y * 16.0) / 16.0;
      const double del = (y - ysq) * (y + ysq);
      result = std::exp(-ysq * ysq) * std::exp(-del) * result;
    }
  } else {
    // erfcx for y > 4 via the asymptotic rational form
    result = 0.0;
    bool done = false;
    if (y >= xbig) {
      if (kind != ErfKind::Erfcx || y >= xmax) {
        done = true;
      } else if (y >= xhuge) {
        result = sqrpi / y;
        done = true;
      }
    }
    if (!done) {
      const double ysq = 1.0 / (y * y);
      double xnum = p[5] * ysq;
      double xden = ysq;
      for (int i = 0; i < 4; ++i) {
        xnum = (xnum + p[i]) * ysq;
        xden = (xden + q[i]) * ysq;
      }
      result = ysq * (xnum + p[4]) / (xden + q[4]);
      result = (sqrpi - result) / y;
      if (kind != ErfKind::Erfcx) {
        const double yy = std::trunc(y * 16.0) / 16.0;
        const double del = (y - yy) * (y + yy);
        result = std::exp(-yy * yy) * std::exp(-del) * result;
      }
    }
  }

  // reflection for negative arguments
  switch (kind) {
    case ErfKind::Erf:
      result = (0.5 - result) + 0.5;
      if (x < 0.0) result = -result;
      break;
    case ErfKind::Erfc:
      if (x < 0.0) result = 2.0 - result;
      break;
    case ErfKind::Erfcx:
      if (x < 0.0) {
        if (x < xneg) {
          result = xinf;
        } else {
          const double ysq = std::trunc(x * 16.0) / 16.0;
          const double del = (x - ysq) * (x + ysq);
          const double e = std::exp(ysq * ysq) * std::exp(del);
          result = (e + e) - result;
        }
      }
      break;
  }
  return result;
}

}  // namespace detail

inline double erf(double x) { return detail::calerf(x, detail::ErfKind::Erf); }
inline double erfc(double x) { return detail::calerf(x, detail::ErfKind::Erfc); }
/// exp(x^2) * erfc(x), overflow-safe for large positive x.
inline double erfcx(double x) { return detail::calerf(x, detail::ErfKind::Erfcx); }

/// log(1 + exp(x)) without overflow.
inline double softplus(double x) {
  if (x > 36.0) return x;             // exp(-x) below double epsilon
  if (x < -745.0) return 0.0;         // exp(x) underflows
  return std::log1p(std::exp(x));
}

inline constexpr double two_over_sqrt_pi = 1.1283791670955125739;  // 2/sqrt(pi)

}  // namespace pafnet::special
