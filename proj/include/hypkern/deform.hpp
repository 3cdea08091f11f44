#pragma once

#include "hypkern/kernel.hpp"
#include "hypkern/minkowski.hpp"
#include "hypkern/scalar.hpp"

namespace hypkern {

struct AlphaRangeError : std::domain_error {
  AlphaRangeError(std::string msg, std::array<int, 3> t)
      : std::domain_error(std::move(msg)), triple(t) {}
  std::array<int, 3> triple;
};

/// The power deformation (beta^t, t alpha).  Exact identity at t = 1 and the
/// one-point kernel at t = 0.  Values outside [0,1] are allowed so that the
/// deformation can be driven into invalidity on purpose; scaled alpha values
/// must stay inside (-pi/2, pi/2).
inline ComplexHyperbolicKernel power_kernel(const ComplexHyperbolicKernel& K, double t) {
  if (t == 1.0) return K;

  const std::size_t n = K.size();
  RealMatrix beta(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    beta(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j)
      beta(i, j) = beta(j, i) = (t == 0.0) ? 1.0 : std::pow(K.beta(static_cast<int>(i),
                                                                   static_cast<int>(j)),
                                                            t);
  }
  ComplexHyperbolicKernel out(K.labels(), std::move(beta));
  if (t != 0.0) {
    for (const auto& [ijk, value] : K.alpha_entries()) {
      const double scaled = t * value;
      if (!(std::abs(scaled) < kHalfPi)) {
        std::ostringstream msg;
        msg << "power_kernel: |t*alpha| >= pi/2 at triple (" << ijk[0] << "," << ijk[1] << ","
            << ijk[2] << ")";
        throw AlphaRangeError(msg.str(), ijk);
      }
      out.set_alpha(ijk[0], ijk[1], ijk[2], scaled);
    }
  }
  return out;
}

/// The proof objects behind the power theorem at one base point:
///   b_j = beta(x0, x_j)          C = e^{i alpha} beta      M  = b b* - C
///   M' = 11* - D C D*  (D = diag(1/b))                     M'' = q(M') entrywise
///   N  = b^t M'' b^t
/// together with the comparison against the direct Hadamard mixed power
/// b_j^t b_k^t - C_{jk}^{t,t}.
struct PowerProofTrace {
  std::vector<double> b;
  HermitianMatrix C, M, M_prime, M_dprime, N;
  double direct_residual = 0.0;
  PsdReport m_prime_psd, m_dprime_psd, n_psd;
  std::size_t max_series_terms = 0;
};

inline PowerProofTrace power_proof_path(const ComplexHyperbolicKernel& K, double t,
                                        int base_index, double tol = 1e-9) {
  if (!(t > 0.0 && t <= 1.0))
    throw std::domain_error("power_proof_path: need 0 < t <= 1");
  BaseGramData d = base_gram_data(K, base_index);
  const std::size_t m = d.others.size();

  ComplexMatrix cm = d.twisted;
  ComplexMatrix mm(m, m), mp(m, m), mpp(m, m), nn(m, m), direct(m, m);
  std::size_t max_terms = 0;
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = 0; k < m; ++k) {
      mm(j, k) = d.b[j] * d.b[k] - cm(j, k);
      mp(j, k) = 1.0 - cm(j, k) / (d.b[j] * d.b[k]);
      if (!(std::abs(mp(j, k)) < 1.0)) {
        std::ostringstream msg;
        msg << "power_proof_path: |M'[" << j << "][" << k << "]| = " << std::abs(mp(j, k))
            << " >= 1; the input kernel is not of hyperbolic type";
        throw std::runtime_error(msg.str());
      }
    }
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = 0; k < m; ++k) {
      const double scale = std::pow(d.b[j], t) * std::pow(d.b[k], t);
      QSeriesResult q = q_series_to_tolerance(mp(j, k), t, 1e-12 / std::max(1.0, scale));
      max_terms = std::max(max_terms, q.terms);
      mpp(j, k) = q.value;
      nn(j, k) = scale * q.value;
      direct(j, k) = scale - mixed_power(cm(j, k), t, t);
    }
  // enforce exact Hermitian symmetry before the PSD checks
  for (std::size_t j = 0; j < m; ++j) {
    mpp(j, j) = cplx(mpp(j, j).real(), 0.0);
    nn(j, j) = cplx(nn(j, j).real(), 0.0);
    for (std::size_t k = j + 1; k < m; ++k) {
      mpp(j, k) = 0.5 * (mpp(j, k) + std::conj(mpp(k, j)));
      mpp(k, j) = std::conj(mpp(j, k));
      nn(j, k) = 0.5 * (nn(j, k) + std::conj(nn(k, j)));
      nn(k, j) = std::conj(nn(j, k));
    }
  }

  PowerProofTrace trace{
      std::move(d.b),        HermitianMatrix(std::move(cm)),  HermitianMatrix(std::move(mm)),
      HermitianMatrix(mp),   HermitianMatrix(std::move(mpp)), HermitianMatrix(nn),
      0.0,                   PsdReport{},                     PsdReport{},
      PsdReport{},           max_terms};
  trace.direct_residual = trace.N.raw().max_abs_diff(direct);
  trace.m_prime_psd = psd_check(trace.M_prime, tol);
  trace.m_dprime_psd = psd_check(trace.M_dprime, tol);
  trace.n_psd = psd_check(trace.N, tol);
  return trace;
}

/// Anisotropic deformation beta' = cosh^2(delta) beta - sinh^2(delta) phi for
/// a positive-type phi with unit diagonal; beta' is again of real hyperbolic
/// type for every delta >= 0 (constant-displacement deformation).
inline RealMatrix anisotropic_deform(const RealMatrix& beta, const RealMatrix& phi, double delta,
                                     double tol = 1e-9) {
  if (delta < 0.0) throw std::domain_error("anisotropic_deform: delta must be >= 0");
  if (beta.rows() != phi.rows() || !beta.square() || !phi.square())
    throw std::invalid_argument("anisotropic_deform: shape mismatch");
  for (std::size_t i = 0; i < phi.rows(); ++i)
    if (std::abs(phi(i, i) - 1.0) > 1e-12)
      throw std::invalid_argument("anisotropic_deform: phi diagonal must equal 1");

  ValidationReport vr = validate_rht(beta, tol);
  if (!vr.passes())
    throw std::invalid_argument("anisotropic_deform: beta is not of real hyperbolic type");
  PsdReport pr = psd_check(phi, tol);
  if (!pr.passes())
    throw NotPsdError("anisotropic_deform: phi is not of positive type", pr);

  if (delta == 0.0) return beta;
  const double c2 = std::cosh(delta) * std::cosh(delta);
  const double s2 = std::sinh(delta) * std::sinh(delta);
  RealMatrix out(beta.rows(), beta.cols());
  for (std::size_t i = 0; i < beta.rows(); ++i)
    for (std::size_t j = 0; j < beta.cols(); ++j) out(i, j) = c2 * beta(i, j) - s2 * phi(i, j);
  return out;
}

// ---------------------------------------------------------------------------
// Argument rigidity witness (four-point configuration on the complex geodesic)

struct RigidityWitness {
  double t = 0.0, s = 0.0, eps = 0.0;
  double r_value = 0.0;       // R(eps) = 2 Re (1+eps-eps zeta)^{t,s} - 3 (1+eps)^t
  double second_order = 0.0;  // 2 (R(eps)+1) / eps^2, estimates R''(0)
  PsdReport matrix_verdict;   // of (1+eps)^t - e^{i s alpha} beta^t on the triple
};

/// Builds x0 = 1+0 and x_j = (1+eps)^{1/2} + eps^{1/2} zeta^j (zeta = e^{2pi i/3},
/// j = 1,2,3) in the complex geodesic, forms the deformed base matrix for the
/// pair (beta^t, s alpha) and evaluates the positivity boundary function R.
inline RigidityWitness rigidity_witness(double t, double s, double eps, double tol = 1e-9) {
  if (!(eps > 0.0)) throw std::domain_error("rigidity_witness: eps must be > 0");
  const cplx zeta = std::polar(1.0, 2.0 * 3.14159265358979323846 / 3.0);

  const MinkowskiSpace space{Field::Complex, 1};
  std::vector<MinkowskiPoint> pts;
  pts.push_back(MinkowskiPoint::base_point(space));
  for (int j = 1; j <= 3; ++j) {
    cplx zj = std::pow(zeta, j);
    pts.emplace_back(space,
                     std::vector<cplx>{std::sqrt(1.0 + eps), std::sqrt(eps) * zj});
  }

  // deformed base matrix (1+eps)^t - e^{i s alpha(x0,xj,xk)} beta(xj,xk)^t;
  // in this gauge e^{i alpha} beta = B(xj, xk), so entries are mixed powers
  const double diag = std::pow(1.0 + eps, t);
  ComplexMatrix a(3, 3);
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      const cplx bjk = mink_form(pts[j + 1], pts[k + 1]);
      a(j, k) = diag - mixed_power(bjk, t, s);
    }
  for (int j = 0; j < 3; ++j) {
    a(j, j) = cplx(a(j, j).real(), 0.0);
    for (int k = j + 1; k < 3; ++k) {
      a(j, k) = 0.5 * (a(j, k) + std::conj(a(k, j)));
      a(k, j) = std::conj(a(j, k));
    }
  }

  RigidityWitness w;
  w.t = t;
  w.s = s;
  w.eps = eps;
  const cplx z = 1.0 + eps - eps * zeta;
  w.r_value = 2.0 * mixed_power(z, t, s).real() - 3.0 * diag;
  w.second_order = 2.0 * (w.r_value + 1.0) / (eps * eps);
  w.matrix_verdict = psd_check(HermitianMatrix(std::move(a)), tol);
  return w;
}

/// Linear-in-eps extrapolation of the second-order coefficient to eps -> 0
/// from two witness evaluations (eps1 < eps2).
inline double extrapolate_second_order(double t, double s, double eps1, double eps2) {
  if (!(eps1 > 0.0 && eps2 > eps1))
    throw std::domain_error("extrapolate_second_order: need 0 < eps1 < eps2");
  const double v1 = rigidity_witness(t, s, eps1).second_order;
  const double v2 = rigidity_witness(t, s, eps2).second_order;
  return (v1 * eps2 - v2 * eps1) / (eps2 - eps1);
}

}  // namespace hypkern
