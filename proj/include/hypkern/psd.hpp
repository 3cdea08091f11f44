#pragma once

#include <optional>
#include <sstream>
#include <utility>

#include "hypkern/matrix.hpp"

namespace hypkern {

enum class PsdVerdict { PSD, NOT_PSD, MARGINAL };

inline const char* to_string(PsdVerdict v) {
  switch (v) {
    case PsdVerdict::PSD: return "PSD";
    case PsdVerdict::NOT_PSD: return "NOT_PSD";
    case PsdVerdict::MARGINAL: return "MARGINAL";
  }
  return "?";
}

/// Tolerance-aware positivity verdict.
///   PSD       min_eig >= -tol * max(1, max_eig)
///   NOT_PSD   min_eig <  -10 * tol * max(1, max_eig)   (witness attached)
///   MARGINAL  in between; reported, never a hard failure.
struct PsdReport {
  double min_eig = 0.0;
  double max_eig = 0.0;
  PsdVerdict verdict = PsdVerdict::PSD;
  std::optional<std::vector<cplx>> witness;  // unit vector c with c*Hc < 0

  bool is_psd() const { return verdict == PsdVerdict::PSD; }
  bool passes() const { return verdict != PsdVerdict::NOT_PSD; }
};

struct NotPsdError : std::runtime_error {
  NotPsdError(std::string msg, PsdReport r)
      : std::runtime_error(std::move(msg)), report(std::move(r)) {}
  PsdReport report;
};

inline cplx quad_form(const HermitianMatrix& H, const std::vector<cplx>& c) {
  const std::size_t n = H.dim();
  if (c.size() != n) throw std::invalid_argument("quad_form: vector length mismatch");
  cplx s = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) s += std::conj(c[j]) * H(j, k) * c[k];
  return s;
}

inline PsdReport psd_check(const HermitianMatrix& H, double tol = 1e-9) {
  if (tol <= 0.0) throw std::invalid_argument("psd_check: tol must be positive");
  PsdReport rep;
  if (H.dim() == 0) return rep;  // empty form is trivially of positive type

  EighResult eg = eigh(H);
  rep.min_eig = eg.eigenvalues.front();
  rep.max_eig = eg.eigenvalues.back();
  const double scale = std::max(1.0, rep.max_eig);
  if (rep.min_eig >= -tol * scale) {
    rep.verdict = PsdVerdict::PSD;
  } else if (rep.min_eig < -10.0 * tol * scale) {
    rep.verdict = PsdVerdict::NOT_PSD;
    std::vector<cplx> c(H.dim());
    double norm2 = 0.0;
    for (std::size_t i = 0; i < H.dim(); ++i) {
      c[i] = eg.vectors(i, 0);
      norm2 += std::norm(c[i]);
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (cplx& v : c) v *= inv;
    rep.witness = std::move(c);
  } else {
    rep.verdict = PsdVerdict::MARGINAL;
  }
  return rep;
}

inline PsdReport psd_check(const ComplexMatrix& m, double tol = 1e-9) {
  return psd_check(HermitianMatrix(m), tol);
}

inline PsdReport psd_check(const RealMatrix& m, double tol = 1e-9) {
  return psd_check(HermitianMatrix::from_real_symmetric(m), tol);
}

/// Conditionally-negative test for a symmetric real kernel: sum c_j c_k K <= 0
/// under sum c_j = 0.  Equivalent to -PKP being PSD for the centering
/// projection P = I - (1/n) 11^T, which is what gets checked; the report reads
/// like a psd_check report of that matrix (verdict PSD means "CND holds").
inline PsdReport cnd_check(const RealMatrix& K, double tol = 1e-9) {
  if (!K.square()) throw std::invalid_argument("cnd_check: matrix must be square");
  const double residual = K.max_abs_diff(K.transpose());
  if (residual > HermitianMatrix::kResidualBound * std::max(1.0, K.max_abs()))
    throw std::invalid_argument("cnd_check: input is not symmetric");
  const std::size_t n = K.rows();
  if (n == 0) return PsdReport{};

  RealMatrix centered(n, n);
  // -(PKP)[j][k], written out so the result is symmetric by construction
  std::vector<double> row_mean(n, 0.0);
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) row_mean[j] += K(j, k);
    total += row_mean[j];
    row_mean[j] /= static_cast<double>(n);
  }
  total /= static_cast<double>(n * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j; k < n; ++k) {
      double v = -(K(j, k) - row_mean[j] - row_mean[k] + total);
      centered(j, k) = v;
      centered(k, j) = v;
    }
  return psd_check(centered, tol);
}

/// Gram factorization of a PSD matrix: returns vectors h_j with
/// <h_j, h_k> = G[j][k] (inner product linear in the second slot).  The vector
/// dimension equals the numerical rank; eigenvalues below tol*max(1,max_eig)
/// are dropped, tiny negatives within the tolerance clamp to zero.
inline std::vector<std::vector<cplx>> gram_factor(const HermitianMatrix& G, double tol = 1e-9) {
  PsdReport rep = psd_check(G, tol);
  if (rep.verdict == PsdVerdict::NOT_PSD) {
    std::ostringstream msg;
    msg << "gram_factor: matrix is not PSD (min_eig " << rep.min_eig << ")";
    throw NotPsdError(msg.str(), rep);
  }

  const std::size_t n = G.dim();
  if (n == 0) return {};
  EighResult eg = eigh(G);
  const double cut = tol * std::max(1.0, rep.max_eig);

  std::vector<std::size_t> keep;
  for (std::size_t m = 0; m < n; ++m)
    if (eg.eigenvalues[m] > cut) keep.push_back(m);

  std::vector<std::vector<cplx>> h(n, std::vector<cplx>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    const std::size_t m = keep[c];
    const double root = std::sqrt(eg.eigenvalues[m]);
    for (std::size_t j = 0; j < n; ++j) h[j][c] = root * std::conj(eg.vectors(j, m));
  }
  return h;
}

inline cplx hilbert_inner(const std::vector<cplx>& u, const std::vector<cplx>& v) {
  if (u.size() != v.size()) throw std::invalid_argument("hilbert_inner: length mismatch");
  cplx s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += std::conj(u[i]) * v[i];
  return s;
}

}  // namespace hypkern
