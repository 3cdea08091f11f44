#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace hypkern {

/// Mixed power z^{t,s} = |z|^t e^{i s arg z} on the slit plane C \ R_{<=0},
/// with arg in (-pi, pi).  Coincides with the principal power when s = t.
inline std::complex<double> mixed_power(std::complex<double> z, double t, double s) {
  if (z.imag() == 0.0 && z.real() <= 0.0)
    throw std::domain_error("mixed_power: z lies on the slit R_{<=0}");
  return std::polar(std::pow(std::abs(z), t), s * std::arg(z));
}

/// Coefficients of q(z) = t * sum_{m>=1} (1-t)(2-t)...(m-1-t)/m! z^m,
/// i.e. the series of 1 - (1-z)^t.  All coefficients are >= 0 for 0 < t <= 1,
/// which is the point of the construction; c_{m+1} = c_m (m-t)/(m+1).
inline std::vector<double> q_coefficients(double t, std::size_t m_max) {
  if (!(t > 0.0 && t <= 1.0)) throw std::domain_error("q_coefficients: need 0 < t <= 1");
  std::vector<double> c(m_max + 1, 0.0);
  if (m_max == 0) return c;
  c[1] = t;
  for (std::size_t m = 1; m < m_max; ++m)
    c[m + 1] = c[m] * (static_cast<double>(m) - t) / static_cast<double>(m + 1);
  return c;
}

struct QSeriesResult {
  std::complex<double> value{0.0, 0.0};
  double tail_bound = 0.0;  // geometric bound from the first omitted term
  std::size_t terms = 0;
};

/// Partial sum of the q series.  |z| < 1 required; the truncation error bound
/// c_{M+1} |z|^{M+1} / (1 - |z|) is reported alongside the value.
inline QSeriesResult q_series(std::complex<double> z, double t, std::size_t n_terms = 512) {
  if (!(t > 0.0 && t <= 1.0)) throw std::domain_error("q_series: need 0 < t <= 1");
  const double r = std::abs(z);
  if (r >= 1.0) throw std::domain_error("q_series: |z| must be < 1");

  QSeriesResult res;
  res.terms = n_terms;
  double coeff = t;  // c_1
  std::complex<double> zp = z;
  std::complex<double> sum = 0.0;
  std::complex<double> comp = 0.0;  // Kahan compensation
  for (std::size_t m = 1; m <= n_terms; ++m) {
    const std::complex<double> term = coeff * zp - comp;
    const std::complex<double> next = sum + term;
    comp = (next - sum) - term;
    sum = next;
    coeff *= (static_cast<double>(m) - t) / static_cast<double>(m + 1);
    zp *= z;
  }
  res.value = sum;
  res.tail_bound = (r < 1.0) ? coeff * std::pow(r, static_cast<double>(n_terms + 1)) / (1.0 - r)
                             : 0.0;
  return res;
}

/// Runs the q series until the tail bound drops below target_abs.  Used by the
/// power proof path, where |z| can sit very close to 1 and 512 terms are not
/// nearly enough.
inline QSeriesResult q_series_to_tolerance(std::complex<double> z, double t, double target_abs,
                                           std::size_t max_terms = (1u << 22)) {
  if (!(t > 0.0 && t <= 1.0)) throw std::domain_error("q_series: need 0 < t <= 1");
  const double r = std::abs(z);
  if (r >= 1.0) throw std::domain_error("q_series: |z| must be < 1");

  QSeriesResult res;
  double coeff = t;
  std::complex<double> zp = z;
  std::complex<double> sum = 0.0;
  std::complex<double> comp = 0.0;
  const double geom = 1.0 / (1.0 - r);
  std::size_t m = 1;
  for (; m <= max_terms; ++m) {
    const std::complex<double> term = coeff * zp - comp;
    const std::complex<double> next = sum + term;
    comp = (next - sum) - term;
    sum = next;
    coeff *= (static_cast<double>(m) - t) / static_cast<double>(m + 1);
    zp *= z;
    if (coeff * std::pow(r, static_cast<double>(m + 1)) * geom < target_abs) break;
  }
  if (m > max_terms)
    throw std::runtime_error("q_series_to_tolerance: term cap reached before target accuracy");
  res.value = sum;
  res.terms = m;
  res.tail_bound = coeff * std::pow(r, static_cast<double>(m + 1)) * geom;
  return res;
}

}  // namespace hypkern
