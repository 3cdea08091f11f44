#pragma once

#include <cmath>
#include <span>

#include "hypkern/kernel.hpp"
#include "hypkern/matrix.hpp"

namespace hypkern {

enum class Field { Real, Complex };

/// Ambient model C + C^n (or R + R^n): the first coordinate is the Minkowski
/// plus-slot, the remaining n coordinates the Hilbert part.
struct MinkowskiSpace {
  Field field = Field::Real;
  std::size_t n = 0;

  std::size_t ambient_dim() const { return n + 1; }
  bool operator==(const MinkowskiSpace&) const = default;
};

/// B(z + u, w + v) = conj(z) w - <u, v>, sesquilinear in the second slot.
inline cplx mink_form(std::span<const cplx> x, std::span<const cplx> y) {
  if (x.size() != y.size() || x.empty())
    throw std::invalid_argument("mink_form: dimension mismatch");
  cplx s = std::conj(x[0]) * y[0];
  for (std::size_t i = 1; i < x.size(); ++i) s -= std::conj(x[i]) * y[i];
  return s;
}

/// A positive vector normalized to B(X,X) = 1.  In the canonical gauge the
/// first coordinate is real and >= 1, which is the lift used throughout the
/// reconstruction code (it exists for every positive line).
class MinkowskiPoint {
 public:
  MinkowskiPoint(MinkowskiSpace space, std::vector<cplx> coords)
      : space_(space), coords_(std::move(coords)) {
    if (coords_.size() != space_.ambient_dim())
      throw std::invalid_argument("MinkowskiPoint: coordinate count mismatch");
    if (space_.field == Field::Real)
      for (const cplx& c : coords_)
        if (c.imag() != 0.0)
          throw std::invalid_argument("MinkowskiPoint: real space got complex coordinates");
    const cplx norm = mink_form(coords_, coords_);
    if (std::abs(norm - 1.0) > 1e-10)
      throw std::invalid_argument("MinkowskiPoint: B(X,X) must equal 1 (got " +
                                  std::to_string(norm.real()) + ")");
  }

  /// Canonical-gauge lift sqrt(1 + ||u||^2) + u of a Hilbert-part vector.
  static MinkowskiPoint from_hilbert(MinkowskiSpace space, const std::vector<cplx>& u) {
    if (u.size() != space.n)
      throw std::invalid_argument("MinkowskiPoint: Hilbert part has wrong dimension");
    double norm2 = 0.0;
    for (const cplx& c : u) norm2 += std::norm(c);
    std::vector<cplx> coords(space.n + 1);
    coords[0] = std::sqrt(1.0 + norm2);
    std::copy(u.begin(), u.end(), coords.begin() + 1);
    return MinkowskiPoint(space, std::move(coords));
  }

  static MinkowskiPoint base_point(MinkowskiSpace space) {
    return from_hilbert(space, std::vector<cplx>(space.n));
  }

  const MinkowskiSpace& space() const { return space_; }
  const std::vector<cplx>& coords() const { return coords_; }
  std::size_t ambient_dim() const { return coords_.size(); }
  bool canonical_gauge() const { return coords_[0].imag() == 0.0 && coords_[0].real() >= 1.0; }

  double max_imag() const {
    double m = 0.0;
    for (const cplx& c : coords_) m = std::max(m, std::abs(c.imag()));
    return m;
  }

 private:
  MinkowskiSpace space_;
  std::vector<cplx> coords_;
};

inline cplx mink_form(const MinkowskiPoint& x, const MinkowskiPoint& y) {
  if (!(x.space() == y.space()))
    throw std::invalid_argument("mink_form: points live in different spaces");
  return mink_form(std::span<const cplx>(x.coords()), std::span<const cplx>(y.coords()));
}

// ---------------------------------------------------------------------------
// Distance and Cartan argument

/// cosh d(x,y) = |B(X,Y)| / (B(X,X) B(Y,Y))^{1/2}, well defined projectively.
/// The normalized ratio is clamped to 1 within a 1e-12 window below it; values
/// further below signal a defect upstream and raise.
inline double dist(const MinkowskiPoint& x, const MinkowskiPoint& y) {
  const double ratio = std::abs(mink_form(x, y));  // both lifts have B(X,X) = 1
  if (ratio >= 1.0) return std::acosh(ratio);
  if (ratio >= 1.0 - 1e-12) return 0.0;
  throw std::domain_error("dist: |B(X,Y)| = " + std::to_string(ratio) +
                          " < 1; not a pair of positive lifts");
}

inline double cosh_dist(const MinkowskiPoint& x, const MinkowskiPoint& y) {
  return std::max(1.0, std::abs(mink_form(x, y)));
}

/// Argument of the Hermitian triple product B(X,Y) B(Y,Z) B(Z,X), taken in
/// (-pi/2, pi/2).  Positive vectors force the triple product into the right
/// half plane; a violation beyond tolerance is an internal invariant error.
inline double cartan_arg(const MinkowskiPoint& x, const MinkowskiPoint& y,
                         const MinkowskiPoint& z) {
  const cplx triple = mink_form(x, y) * mink_form(y, z) * mink_form(z, x);
  const double mag = std::abs(triple);
  if (!(mag > 0.0)) throw std::runtime_error("cartan_arg: vanishing triple product");
  if (triple.real() / mag < -1e-10)
    throw std::runtime_error("cartan_arg: triple product has nonpositive real part");
  return std::atan2(triple.imag(), triple.real());
}

/// The tautological kernel of a finite point set: beta = cosh of the pairwise
/// distances, alpha = the Cartan argument on increasing triples.
inline ComplexHyperbolicKernel tautological_kernel(const std::vector<MinkowskiPoint>& points) {
  if (points.empty()) throw std::invalid_argument("tautological_kernel: need at least 1 point");
  const std::size_t m = points.size();
  RealMatrix beta(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    beta(i, i) = 1.0;
    for (std::size_t j = i + 1; j < m; ++j)
      beta(i, j) = beta(j, i) = cosh_dist(points[i], points[j]);
  }
  ComplexHyperbolicKernel K(beta);
  if (points[0].space().field == Field::Complex) {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j)
        for (std::size_t k = j + 1; k < m; ++k)
          K.set_alpha(static_cast<int>(i), static_cast<int>(j), static_cast<int>(k),
                      cartan_arg(points[i], points[j], points[k]));
  }
  return K;
}

// ---------------------------------------------------------------------------
// Isometries

/// Element of U(1,n) (or O(1,n)) stored as a raw matrix; the defining relation
/// g* J g = J with J = diag(1, -1, ..., -1) is verified at construction.
class Isometry {
 public:
  Isometry(MinkowskiSpace space, ComplexMatrix g) : space_(space), g_(std::move(g)) {
    const std::size_t d = space_.ambient_dim();
    if (g_.rows() != d || g_.cols() != d)
      throw std::invalid_argument("Isometry: matrix has wrong dimension");
    if (space_.field == Field::Real)
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          if (g_(i, j).imag() != 0.0)
            throw std::invalid_argument("Isometry: real space got a complex matrix");
    double resid = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        cplx v = 0.0;  // (g* J g)[i][j]
        for (std::size_t k = 0; k < d; ++k) {
          const double jk = (k == 0) ? 1.0 : -1.0;
          v += std::conj(g_(k, i)) * jk * g_(k, j);
        }
        const double target = (i == j) ? ((i == 0) ? 1.0 : -1.0) : 0.0;
        resid = std::max(resid, std::abs(v - target));
      }
    if (resid > 1e-10)
      throw std::invalid_argument("Isometry: form-preservation residual " +
                                  std::to_string(resid));
  }

  static Isometry identity(MinkowskiSpace space) {
    return Isometry(space, ComplexMatrix::identity(space.ambient_dim()));
  }

  const MinkowskiSpace& space() const { return space_; }
  const ComplexMatrix& matrix() const { return g_; }

  std::vector<cplx> apply_raw(const std::vector<cplx>& x) const {
    const std::size_t d = space_.ambient_dim();
    if (x.size() != d) throw std::invalid_argument("Isometry: vector dimension mismatch");
    std::vector<cplx> y(d, cplx{});
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) y[i] += g_(i, j) * x[j];
    return y;
  }

  MinkowskiPoint apply(const MinkowskiPoint& p) const {
    return MinkowskiPoint(space_, apply_raw(p.coords()));
  }

 private:
  MinkowskiSpace space_;
  ComplexMatrix g_;
};

// ---------------------------------------------------------------------------
// Translation length

struct TranslationLengthEstimate {
  double estimate = 0.0;
  std::vector<double> per_step;  // log(cosh d(g^n p, p)) / n for n = 1..n_used
  std::size_t n_used = 0;
  bool truncated = false;  // n_max was reduced to avoid overflow
  double tail_spread = 0.0;  // max - min of per_step over the second half
};

/// Estimates l(g) = log lim cosh d(g^n p, p)^{1/n}.  The per-step sequence is
/// returned as a diagnostic; the headline estimate is the difference quotient
/// of log cosh d between n_max and n_max/2, which kills the additive constant
/// that the plain 1/n normalisation carries (cosh d ~ e^d / 2).
inline TranslationLengthEstimate translation_length(const Isometry& g, const MinkowskiPoint& p,
                                                    std::size_t n_max) {
  if (n_max < 8) throw std::invalid_argument("translation_length: n_max must be at least 8");
  TranslationLengthEstimate out;
  out.per_step.reserve(n_max);
  std::vector<double> log_beta;
  log_beta.reserve(n_max);

  std::vector<cplx> x = p.coords();
  for (std::size_t n = 1; n <= n_max; ++n) {
    x = g.apply_raw(x);
    double big = 0.0;
    for (const cplx& c : x) big = std::max(big, std::abs(c));
    if (big > 1e150) {  // cosh-sized values would overflow past here
      out.truncated = true;
      break;
    }
    const double beta = std::max(1.0, std::abs(mink_form(std::span<const cplx>(x),
                                                         std::span<const cplx>(p.coords()))));
    log_beta.push_back(std::log(beta));
    out.per_step.push_back(log_beta.back() / static_cast<double>(n));
  }

  out.n_used = log_beta.size();
  if (out.n_used == 0) throw std::runtime_error("translation_length: no usable iterates");
  const std::size_t last = out.n_used - 1;
  const std::size_t mid = out.n_used / 2;
  if (last > mid)
    out.estimate = (log_beta[last] - log_beta[mid]) / static_cast<double>(last - mid);
  else
    out.estimate = out.per_step[last];

  double lo = out.per_step[mid], hi = out.per_step[mid];
  for (std::size_t i = mid; i < out.n_used; ++i) {
    lo = std::min(lo, out.per_step[i]);
    hi = std::max(hi, out.per_step[i]);
  }
  out.tail_spread = hi - lo;
  return out;
}

// ---------------------------------------------------------------------------
// Horospherical chart (real field)

/// Point in the horospherical basis {x, y, E} where the form reads
/// x y' + x' y - <v, v'>.
struct HoroVector {
  double x = 0.0;
  double y = 0.0;
  std::vector<double> v;
};

inline double horo_form(const HoroVector& a, const HoroVector& b) {
  if (a.v.size() != b.v.size()) throw std::invalid_argument("horo_form: dimension mismatch");
  double s = a.x * b.y + b.x * a.y;
  for (std::size_t i = 0; i < a.v.size(); ++i) s -= a.v[i] * b.v[i];
  return s;
}

/// sigma_s(v) = ( (e^s + e^{-s} ||v||^2)/2, e^{-s}, e^{-s} v ); the parameter
/// -s is a Busemann function at the chart's boundary point, and
/// B(sigma_s(v), sigma_s(v)) = 1 holds exactly.
inline HoroVector horo_point(double s, const std::vector<double>& v) {
  HoroVector h;
  double norm2 = 0.0;
  for (double c : v) norm2 += c * c;
  const double es = std::exp(s), ems = std::exp(-s);
  h.x = 0.5 * (es + ems * norm2);
  h.y = ems;
  h.v.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) h.v[i] = ems * v[i];
  return h;
}

/// Change of basis (x, y) -> ((x+y)/sqrt 2, (x-y)/sqrt 2) into the standard
/// diagonal-form coordinates; an isometry of forms.
inline MinkowskiPoint horo_to_minkowski(const HoroVector& h) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  std::vector<cplx> coords(h.v.size() + 2);
  coords[0] = (h.x + h.y) * inv_sqrt2;
  coords[1] = (h.x - h.y) * inv_sqrt2;
  for (std::size_t i = 0; i < h.v.size(); ++i) coords[i + 2] = h.v[i];
  return MinkowskiPoint(MinkowskiSpace{Field::Real, h.v.size() + 1}, std::move(coords));
}

}  // namespace hypkern
