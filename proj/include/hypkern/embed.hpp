#pragma once

#include "hypkern/kernel.hpp"
#include "hypkern/minkowski.hpp"
#include "hypkern/psd.hpp"

namespace hypkern {

struct GnsError : std::runtime_error {
  GnsError(std::string msg, ValidationReport rep)
      : std::runtime_error(std::move(msg)), report(std::move(rep)) {}
  ValidationReport report;
};

/// Explicit hyperbolic-space model of a kernel: f(x) = beta(x, x0) + h(x) in
/// canonical gauge, with f(x0) = 1 + 0 exactly.  The Hilbert dimension is the
/// numerical rank of the base matrix Phi.
struct Embedding {
  ComplexHyperbolicKernel kernel;
  int base_index = 0;
  std::vector<MinkowskiPoint> points;

  std::size_t hilbert_dim() const { return points.empty() ? 0 : points[0].space().n; }
};

/// GNS reconstruction: Gram-factor the base matrix Phi and assemble the lifts.
/// Both embedding invariants (cosh-distance and Cartan-argument round trip,
/// 1e-8) are verified before returning.
inline Embedding gns_embed(const ComplexHyperbolicKernel& K, int base_index, double tol = 1e-9) {
  ValidationReport vr = validate_cht(K, tol, base_index);
  if (!vr.passes())
    throw GnsError("gns_embed: kernel is not of complex hyperbolic type at base " +
                       std::to_string(base_index),
                   std::move(vr));

  const std::size_t n = K.size();
  BaseGramData d = base_gram_data(K, base_index);
  HermitianMatrix phi = base_phi(K, base_index);
  std::vector<std::vector<cplx>> h = gram_factor(phi, tol);
  const std::size_t rank = h.empty() ? 0 : h[0].size();

  const MinkowskiSpace space{Field::Complex, rank};
  std::vector<MinkowskiPoint> points;
  points.reserve(n);
  std::size_t pos = 0;  // position within the non-base indices
  for (std::size_t i = 0; i < n; ++i) {
    if (static_cast<int>(i) == base_index) {
      points.push_back(MinkowskiPoint::base_point(space));
      continue;
    }
    std::vector<cplx> coords(rank + 1);
    coords[0] = d.b[pos];
    for (std::size_t m = 0; m < rank; ++m) coords[m + 1] = h[pos][m];
    // rank truncation can nudge B(X,X) off 1 by a sliver; rescale the lift
    cplx norm = mink_form(std::span<const cplx>(coords), std::span<const cplx>(coords));
    if (norm.real() <= 0.0)
      throw std::runtime_error("gns_embed: reconstructed lift is not a positive vector");
    const double inv = 1.0 / std::sqrt(norm.real());
    if (std::abs(norm.real() - 1.0) > 1e-13)
      for (cplx& c : coords) c *= inv;
    points.emplace_back(space, std::move(coords));
    ++pos;
  }

  double beta_resid = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      beta_resid = std::max(
          beta_resid, std::abs(cosh_dist(points[i], points[j]) -
                               K.beta(static_cast<int>(i), static_cast<int>(j))));
  double alpha_resid = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k)
        alpha_resid = std::max(
            alpha_resid,
            std::abs(cartan_arg(points[i], points[j], points[k]) -
                     K.alpha(static_cast<int>(i), static_cast<int>(j), static_cast<int>(k))));
  if (beta_resid > 1e-8 || alpha_resid > 1e-8)
    throw std::runtime_error("gns_embed: round-trip residual above tolerance (beta " +
                             std::to_string(beta_resid) + ", alpha " +
                             std::to_string(alpha_resid) + ")");

  return Embedding{K, base_index, std::move(points)};
}

// ---------------------------------------------------------------------------
// Twisted projective action of kernel symmetries

struct ProjectiveActionResult {
  ComplexMatrix matrix;              // phi -> g.phi on the span of point masses
  double invariance_residual = 0.0;  // |U* B_z U - B_z| relative to max entry
};

namespace detail {
inline void check_permutation_symmetry(const ComplexHyperbolicKernel& K,
                                       const std::vector<int>& perm) {
  const int n = static_cast<int>(K.size());
  if (static_cast<int>(perm.size()) != n)
    throw std::invalid_argument("projective_action: permutation has wrong length");
  std::vector<bool> seen(n, false);
  for (int v : perm) {
    if (v < 0 || v >= n || seen[v])
      throw std::invalid_argument("projective_action: not a permutation");
    seen[v] = true;
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(K.beta(perm[i], perm[j]) - K.beta(i, j)) > 1e-10)
        throw std::invalid_argument("projective_action: permutation does not preserve beta at (" +
                                    std::to_string(i) + "," + std::to_string(j) + ")");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k)
        if (std::abs(K.alpha(perm[i], perm[j], perm[k]) - K.alpha(i, j, k)) > 1e-10)
          throw std::invalid_argument(
              "projective_action: permutation does not preserve alpha at (" + std::to_string(i) +
              "," + std::to_string(j) + "," + std::to_string(k) + ")");
}
}  // namespace detail

/// The Hermitian form B_z(phi, psi) = sum e^{i alpha(z,x,y)} beta(x,y)
/// conj(phi(x)) psi(y) as a matrix on point masses.
inline HermitianMatrix twisted_form_matrix(const ComplexHyperbolicKernel& K, int z) {
  const int n = static_cast<int>(K.size());
  if (z < 0 || z >= n) throw std::invalid_argument("twisted_form_matrix: base out of range");
  ComplexMatrix g(n, n);
  for (int x = 0; x < n; ++x) {
    g(x, x) = K.beta(x, x);
    for (int y = x + 1; y < n; ++y) {
      const cplx v = std::polar(K.beta(x, y), K.alpha(z, x, y));
      g(x, y) = v;
      g(y, x) = std::conj(v);
    }
  }
  return HermitianMatrix(std::move(g));
}

/// Matrix of phi -> g.phi, (g.phi)(x) = e^{i alpha(z, gz, x)} phi(g^{-1} x),
/// for a permutation g preserving (beta, alpha).  Verifies that the twisted
/// form B_z is preserved on the basis.
inline ProjectiveActionResult projective_action(const ComplexHyperbolicKernel& K,
                                                const std::vector<int>& perm, int z) {
  detail::check_permutation_symmetry(K, perm);
  const int n = static_cast<int>(K.size());
  if (z < 0 || z >= n) throw std::invalid_argument("projective_action: base out of range");

  ComplexMatrix u(n, n);
  for (int y = 0; y < n; ++y)
    u(perm[y], y) = std::polar(1.0, K.alpha(z, perm[z], perm[y]));

  const HermitianMatrix bz = twisted_form_matrix(K, z);
  const ComplexMatrix lhs = u.adjoint() * bz.raw() * u;
  const double resid = lhs.max_abs_diff(bz.raw()) / std::max(1.0, bz.raw().max_abs());
  return ProjectiveActionResult{std::move(u), resid};
}

/// Residual of the multiplier identity g.(h.phi) = e^{i alpha(z, gz, ghz)} (gh).phi.
inline double multiplier_audit(const ComplexHyperbolicKernel& K, const std::vector<int>& g,
                               const std::vector<int>& h, int z) {
  const int n = static_cast<int>(K.size());
  std::vector<int> gh(n);
  for (int i = 0; i < n; ++i) gh[i] = g[h[i]];
  const ComplexMatrix ug = projective_action(K, g, z).matrix;
  const ComplexMatrix uh = projective_action(K, h, z).matrix;
  const ComplexMatrix ugh = projective_action(K, gh, z).matrix;
  const cplx mult = std::polar(1.0, K.alpha(z, g[z], gh[z]));
  return (ug * uh).max_abs_diff(ugh * mult);
}

}  // namespace hypkern
