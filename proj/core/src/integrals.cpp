#include <array>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gao/perturbation.hpp"

namespace gao {
namespace {

using Wide = long double;

void check_domain(double k, double t, double T) {
  require(k > 0.0 && std::isfinite(k), ErrorCode::InvalidArgument, "k must be > 0");
  require(t >= 0.0 && t <= T, ErrorCode::InvalidArgument, "integrals need 0 <= t <= T");
}

// Moments m_j = int_0^D p^j g(T - p) dp for j = 0..3 with
// g(tau) = 2 (1 - k tau) / (2 - k tau)^2, from the expansion
// g(T - p) = (2 / c^2) sum_n (-1)^n (c - 1 - n) (k p / c)^n,  c = 2 - kT.
std::array<Wide, 4> short_window_moments(Wide k, Wide D, Wide c) {
  const Wide rho = k * D / c;
  std::array<Wide, 4> m{};
  for (int j = 0; j < 4; ++j) {
    Wide sum = 0.0L;
    Wide rho_n = 1.0L;
    for (int n = 0; n < 400; ++n) {
      const Wide sign = (n % 2 == 0) ? 1.0L : -1.0L;
      const Wide term = sign * (c - 1.0L - n) * rho_n / static_cast<Wide>(j + n + 1);
      sum += term;
      if (n > 4 && std::fabs(term) <= 1e-21L * std::fabs(sum)) break;
      rho_n *= rho;
    }
    m[j] = 2.0L / (c * c) * std::pow(D, static_cast<Wide>(j + 1)) * sum;
  }
  return m;
}

IIntegrals from_moments(const std::array<Wide, 4>& m, Wide T) {
  // tau^n = (T - p)^n expanded binomially; every term shrinks by D / T so the
  // sums are well conditioned.
  const Wide i0 = m[0];
  const Wide i1 = T * m[0] - m[1];
  const Wide i2 = T * T * m[0] - 2.0L * T * m[1] + m[2];
  const Wide i3 = T * T * T * m[0] - 3.0L * T * T * m[1] + 3.0L * T * m[2] - m[3];
  return {static_cast<double>(i0), static_cast<double>(i1), static_cast<double>(i2),
          static_cast<double>(i3), static_cast<double>(m[2]), static_cast<double>(m[3])};
}

constexpr Wide kSeriesRatio = 0.25L;

}  // namespace

IIntegrals i_integrals_closed(double k_in, double t_in, double T_in) {
  check_domain(k_in, t_in, T_in);
  require(2.0 - k_in * T_in > kSingularityTol, ErrorCode::SingularIntegral,
          "closed-form integrals need kT < 2");
  if (t_in == T_in) return {};

  const Wide k = k_in, t = t_in, T = T_in;
  const Wide wt = 2.0L - k * t;
  const Wide wT = 2.0L - k * T;
  const Wide D = k * (T - t);

  if (D / wT <= kSeriesRatio) return from_moments(short_window_moments(k, T - t, wT), T);

  const Wide lg = std::log1p(-D / wt);  // ln((2 - kT) / (2 - kt))
  const Wide ab = wT * wt;
  const Wide i0 = -2.0L / k * (D / ab + lg);
  const Wide i1 = -2.0L / (k * k) * (D * (1.0L + 2.0L / ab) + 3.0L * lg);
  const Wide i2 = -2.0L / (k * k * k) *
                  (k * k / 2.0L * (T * T - t * t) + D * (3.0L + 4.0L / ab) + 8.0L * lg);
  const Wide i3 = -2.0L / (k * k * k * k) *
                  (k * k * k / 3.0L * (T * T * T - t * t * t) +
                   1.5L * k * k * (T * T - t * t) + 8.0L * D * (1.0L + 1.0L / ab) +
                   20.0L * lg);
  const Wide i4 = i2 - 2.0L * T * i1 + T * T * i0;
  const Wide i5 = -i3 + 3.0L * T * i2 - 3.0L * T * T * i1 + T * T * T * i0;
  return {static_cast<double>(i0), static_cast<double>(i1), static_cast<double>(i2),
          static_cast<double>(i3), static_cast<double>(i4), static_cast<double>(i5)};
}

IIntegrals i_integrals_quadrature(double k, double t, double T, double abs_tol) {
  check_domain(k, t, T);
  require(abs_tol > 0.0, ErrorCode::InvalidArgument, "tolerance must be > 0");
  const double pole = 2.0 / k;
  if (pole >= t - kSingularityTol / k && pole <= T + kSingularityTol / k) {
    std::ostringstream os;
    os << "integrand pole at tau = " << pole << " lies in [" << t << ", " << T << "]";
    fail(ErrorCode::PoleInInterval, os.str());
  }
  if (t == T) return {};

  auto weight = [k](double tau) {
    const double w = 2.0 - k * tau;
    return 2.0 * (1.0 - k * tau) / (w * w);
  };
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  // Integrate on [-1, 1] with the Jacobian folded into the integrand: the
  // recursion compares unscaled panel errors with a scaled tolerance, which
  // only agrees when the interval half-width is one.
  const double mid = 0.5 * (t + T);
  const double half = 0.5 * (T - t);
  // Integrands get both x and T - x; the latter is formed from v directly so
  // it keeps full relative precision when the window is short.
  auto integrate = [&](auto&& f) {
    double err = 0.0;
    double l1 = 0.0;
    auto g = [&](double v) { return half * f(mid + half * v, half * (1.0 - v)); };
    const double v = GK::integrate(g, -1.0, 1.0, 15, 1e-13, &err, &l1);
    require(err <= abs_tol || err <= 1e-11 * l1, ErrorCode::SingularIntegral,
            "adaptive quadrature did not reach the requested tolerance");
    return v;
  };

  IIntegrals out;
  out.i0 = integrate([&](double x, double) { return weight(x); });
  out.i1 = integrate([&](double x, double) { return x * weight(x); });
  out.i2 = integrate([&](double x, double) { return x * x * weight(x); });
  out.i3 = integrate([&](double x, double) { return x * x * x * weight(x); });
  out.i4 = integrate([&](double x, double r) { return r * r * weight(x); });
  out.i5 = integrate([&](double x, double r) { return r * r * r * weight(x); });
  return out;
}

}  // namespace gao
