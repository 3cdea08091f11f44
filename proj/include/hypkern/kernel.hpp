#pragma once

#include <array>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "hypkern/matrix.hpp"
#include "hypkern/psd.hpp"

namespace hypkern {

inline constexpr double kHalfPi = 1.5707963267948966;

/// Structural violation of a kernel (bad diagonal, alpha out of range, ...).
/// Carries a human-readable location so CLI diagnostics can point at the field.
struct KernelStructureError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A kernel of complex hyperbolic type on a finite labelled point set:
/// a symmetric beta matrix (unit diagonal, entries >= 0) together with a
/// sparse alternating alpha tensor stored on strictly increasing triples,
/// values in the open interval (-pi/2, pi/2).  Absent triples read as 0, so
/// kernels of real type carry no alpha payload at all.
class ComplexHyperbolicKernel {
 public:
  ComplexHyperbolicKernel() = default;

  ComplexHyperbolicKernel(std::vector<std::string> labels, RealMatrix beta)
      : labels_(std::move(labels)), beta_(std::move(beta)) {
    check_structure();
  }

  explicit ComplexHyperbolicKernel(RealMatrix beta)
      : ComplexHyperbolicKernel(default_labels(beta.rows()), std::move(beta)) {}

  static std::vector<std::string> default_labels(std::size_t n) {
    std::vector<std::string> ls(n);
    for (std::size_t i = 0; i < n; ++i) ls[i] = std::to_string(i);
    return ls;
  }

  std::size_t size() const { return beta_.rows(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const RealMatrix& beta_matrix() const { return beta_; }
  const std::map<std::array<int, 3>, double>& alpha_entries() const { return alpha_; }

  double beta(int i, int j) const { return beta_(i, j); }

  /// Alternating extension: repeated indices give 0, otherwise the stored
  /// value on the sorted triple times the sign of the sorting permutation.
  double alpha(int i, int j, int k) const {
    if (i == j || j == k || i == k) return 0.0;
    int sign = 1;
    sort3(i, j, k, sign);
    auto it = alpha_.find({i, j, k});
    return it == alpha_.end() ? 0.0 : sign * it->second;
  }

  void set_alpha(int i, int j, int k, double value) {
    if (i == j || j == k || i == k) {
      if (value != 0.0)
        throw KernelStructureError("alpha: repeated indices must map to 0");
      return;
    }
    check_index(i);
    check_index(j);
    check_index(k);
    int sign = 1;
    sort3(i, j, k, sign);
    const double v = sign * value;
    if (!(std::abs(v) < kHalfPi)) {
      std::ostringstream msg;
      msg << "alpha(" << i << "," << j << "," << k << ") = " << v
          << " outside the open interval (-pi/2, pi/2)";
      throw KernelStructureError(msg.str());
    }
    if (v == 0.0)
      alpha_.erase({i, j, k});
    else
      alpha_[{i, j, k}] = v;
  }

  double max_beta_diff(const ComplexHyperbolicKernel& other) const {
    return beta_.max_abs_diff(other.beta_);
  }

  double max_alpha_diff(const ComplexHyperbolicKernel& other) const {
    const int n = static_cast<int>(std::min(size(), other.size()));
    double m = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int k = j + 1; k < n; ++k)
          m = std::max(m, std::abs(alpha(i, j, k) - other.alpha(i, j, k)));
    return m;
  }

 private:
  static void sort3(int& i, int& j, int& k, int& sign) {
    if (i > j) { std::swap(i, j); sign = -sign; }
    if (j > k) { std::swap(j, k); sign = -sign; }
    if (i > j) { std::swap(i, j); sign = -sign; }
  }

  void check_index(int i) const {
    if (i < 0 || static_cast<std::size_t>(i) >= size())
      throw KernelStructureError("alpha: point index " + std::to_string(i) + " out of range");
  }

  void check_structure() {
    if (!beta_.square()) throw KernelStructureError("beta: matrix must be square");
    if (labels_.size() != beta_.rows())
      throw KernelStructureError("labels: count does not match beta dimension");
    const double scale = std::max(1.0, beta_.max_abs());
    for (std::size_t i = 0; i < beta_.rows(); ++i) {
      if (std::abs(beta_(i, i) - 1.0) > 1e-12)
        throw KernelStructureError("beta[" + std::to_string(i) + "][" + std::to_string(i) +
                                   "]: diagonal entry must equal 1");
      beta_(i, i) = 1.0;
      for (std::size_t j = i + 1; j < beta_.cols(); ++j) {
        if (std::abs(beta_(i, j) - beta_(j, i)) > 1e-12 * scale)
          throw KernelStructureError("beta[" + std::to_string(i) + "][" + std::to_string(j) +
                                     "]: matrix is not symmetric");
        if (beta_(i, j) < 0.0)
          throw KernelStructureError("beta[" + std::to_string(i) + "][" + std::to_string(j) +
                                     "]: entries must be >= 0");
        const double avg = 0.5 * (beta_(i, j) + beta_(j, i));
        beta_(i, j) = beta_(j, i) = avg;
      }
    }
  }

  std::vector<std::string> labels_;
  RealMatrix beta_;
  std::map<std::array<int, 3>, double> alpha_;
};

// ---------------------------------------------------------------------------
// Cocycle audit

struct CocycleAudit {
  double max_residual = 0.0;
  std::array<int, 4> worst{-1, -1, -1, -1};
};

/// Exact four-term alternating sum d_alpha over all increasing quadruples.
/// (The alternating extension makes these representative of all quadruples.)
inline CocycleAudit check_cocycle(const ComplexHyperbolicKernel& K) {
  CocycleAudit audit;
  const int n = static_cast<int>(K.size());
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c)
        for (int d = c + 1; d < n; ++d) {
          const double v = K.alpha(b, c, d) - K.alpha(a, c, d) + K.alpha(a, b, d) -
                           K.alpha(a, b, c);
          if (std::abs(v) > audit.max_residual) {
            audit.max_residual = std::abs(v);
            audit.worst = {a, b, c, d};
          }
        }
  return audit;
}

// ---------------------------------------------------------------------------
// Base-point matrices

inline std::vector<int> other_indices(std::size_t n, int base) {
  std::vector<int> othr;
  othr.reserve(n > 0 ? n - 1 : 0);
  for (int i = 0; i < static_cast<int>(n); ++i)
    if (i != base) othr.push_back(i);
  return othr;
}

/// The twisted Gram data at a base point: b_j = beta(x0, x_j) and
/// C[j][k] = e^{i alpha(x0, x_j, x_k)} beta(x_j, x_k) over the other indices.
struct BaseGramData {
  std::vector<int> others;
  std::vector<double> b;
  ComplexMatrix twisted;  // C
};

inline BaseGramData base_gram_data(const ComplexHyperbolicKernel& K, int base) {
  const std::size_t n = K.size();
  if (base < 0 || static_cast<std::size_t>(base) >= n)
    throw std::invalid_argument("base index out of range");
  BaseGramData d;
  d.others = other_indices(n, base);
  const std::size_t m = d.others.size();
  d.b.resize(m);
  d.twisted = ComplexMatrix(m, m);
  for (std::size_t a = 0; a < m; ++a) d.b[a] = K.beta(base, d.others[a]);
  for (std::size_t a = 0; a < m; ++a) {
    d.twisted(a, a) = K.beta(d.others[a], d.others[a]);
    for (std::size_t c = a + 1; c < m; ++c) {
      const double ar = K.alpha(base, d.others[a], d.others[c]);
      const cplx v = std::polar(K.beta(d.others[a], d.others[c]), ar);
      d.twisted(a, c) = v;
      d.twisted(c, a) = std::conj(v);
    }
  }
  return d;
}

/// Phi[j][k] = beta(x_j,x0) beta(x0,x_k) - e^{i alpha(x0,x_j,x_k)} beta(x_j,x_k)
/// over the indices other than the base.  Positive type of this matrix at
/// every base is the defining condition of complex hyperbolic type.
inline HermitianMatrix base_phi(const ComplexHyperbolicKernel& K, int base) {
  BaseGramData d = base_gram_data(K, base);
  const std::size_t m = d.others.size();
  ComplexMatrix phi(m, m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t c = 0; c < m; ++c)
      phi(a, c) = d.b[a] * d.b[c] - d.twisted(a, c);
  return HermitianMatrix(std::move(phi));
}

// ---------------------------------------------------------------------------
// Validation

inline constexpr double kCocycleTol = 1e-9;

struct ValidationReport {
  enum class Verdict { VALID, INVALID, MARGINAL };

  std::map<int, PsdReport> per_base;
  double cocycle_residual = 0.0;
  Verdict verdict = Verdict::VALID;
  // (base index, coefficient vector over the indices != base, ascending order)
  std::optional<std::pair<int, std::vector<cplx>>> witness;

  bool valid() const { return verdict == Verdict::VALID; }
  bool passes() const { return verdict != Verdict::INVALID; }
};

inline const char* to_string(ValidationReport::Verdict v) {
  switch (v) {
    case ValidationReport::Verdict::VALID: return "VALID";
    case ValidationReport::Verdict::INVALID: return "INVALID";
    case ValidationReport::Verdict::MARGINAL: return "MARGINAL";
  }
  return "?";
}

/// Validates a kernel of complex hyperbolic type: the cocycle identity for
/// alpha plus a PSD check of the base matrix Phi.  With no base given, every
/// base point is checked (the definition); with a base, only that one (the
/// equivalent one-base criterion).
inline ValidationReport validate_cht(const ComplexHyperbolicKernel& K, double tol = 1e-9,
                                     std::optional<int> base = std::nullopt) {
  ValidationReport rep;
  rep.cocycle_residual = check_cocycle(K).max_residual;

  std::vector<int> bases;
  if (base) {
    if (*base < 0 || static_cast<std::size_t>(*base) >= K.size())
      throw std::invalid_argument("validate_cht: base index out of range");
    bases.push_back(*base);
  } else {
    for (int i = 0; i < static_cast<int>(K.size()); ++i) bases.push_back(i);
  }

  bool any_marginal = false;
  bool any_fail = false;
  for (int b : bases) {
    PsdReport r = psd_check(base_phi(K, b), tol);
    if (r.verdict == PsdVerdict::NOT_PSD && !rep.witness && r.witness)
      rep.witness = std::make_pair(b, *r.witness);
    any_fail = any_fail || r.verdict == PsdVerdict::NOT_PSD;
    any_marginal = any_marginal || r.verdict == PsdVerdict::MARGINAL;
    rep.per_base.emplace(b, std::move(r));
  }

  if (any_fail || rep.cocycle_residual > kCocycleTol)
    rep.verdict = ValidationReport::Verdict::INVALID;
  else if (any_marginal)
    rep.verdict = ValidationReport::Verdict::MARGINAL;
  else
    rep.verdict = ValidationReport::Verdict::VALID;
  return rep;
}

/// Real-hyperbolic-type validation of a bare beta matrix (alpha == 0).
inline ValidationReport validate_rht(const RealMatrix& beta, double tol = 1e-9,
                                     std::optional<int> base = std::nullopt) {
  ComplexHyperbolicKernel K(beta);  // structural checks happen here
  return validate_cht(K, tol, base);
}

// ---------------------------------------------------------------------------
// Schoenberg transforms (real-type calculus)

struct SchoenbergReport {
  PsdReport log_cnd;                                 // CND verdict for log beta
  std::vector<std::pair<double, PsdReport>> powers;  // (t, verdict of beta^{-t})

  bool passes() const {
    if (!log_cnd.passes()) return false;
    for (const auto& [t, r] : powers)
      if (!r.passes()) return false;
    return true;
  }
};

/// log beta must be of conditionally negative type and beta^{-t} of positive
/// type for each t in the grid.  beta is expected to come from a validated
/// kernel (all entries >= 1).
inline SchoenbergReport schoenberg_suite(const RealMatrix& beta,
                                         const std::vector<double>& t_grid, double tol = 1e-9) {
  const std::size_t n = beta.rows();
  RealMatrix logb(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (!(beta(i, j) > 0.0))
        throw std::domain_error("schoenberg_suite: beta entries must be positive");
      logb(i, j) = std::log(beta(i, j));
    }

  SchoenbergReport rep;
  rep.log_cnd = cnd_check(logb, tol);
  for (double t : t_grid) {
    if (t < 0.0) throw std::domain_error("schoenberg_suite: t grid must be >= 0");
    RealMatrix pw(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) pw(i, j) = std::pow(beta(i, j), -t);
    rep.powers.emplace_back(t, psd_check(pw, tol));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Polarisation equivalence

struct PolarisationReport {
  PsdReport phi_psd;   // Phi(x,y) = beta(x,x0) beta(x0,y) - beta(x,y)
  PsdReport psi_cnd;   // Psi(x,y) = (beta(x,x0)-beta(x0,y))^2/2 + beta(x,y) - 1
  double identity_residual = 0.0;  // relative to max(1, max|Phi|)

  bool verdicts_agree() const { return phi_psd.passes() == psi_cnd.passes(); }
};

inline PolarisationReport polarisation_equiv(const RealMatrix& beta, int x0, double tol = 1e-9) {
  const std::size_t n = beta.rows();
  if (!beta.square() || x0 < 0 || static_cast<std::size_t>(x0) >= n)
    throw std::invalid_argument("polarisation_equiv: bad arguments");

  RealMatrix phi(n, n), psi(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      phi(i, j) = beta(i, x0) * beta(x0, j) - beta(i, j);
      const double diff = beta(i, x0) - beta(x0, j);
      psi(i, j) = 0.5 * diff * diff + beta(i, j) - 1.0;
    }
  // symmetrize away the last-bit asymmetry of the float products
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      phi(i, j) = phi(j, i) = 0.5 * (phi(i, j) + phi(j, i));
      psi(i, j) = psi(j, i) = 0.5 * (psi(i, j) + psi(j, i));
    }

  PolarisationReport rep;
  double resid = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double lhs = phi(i, j);
      const double rhs = psi(i, x0) + psi(x0, j) - psi(i, j);
      resid = std::max(resid, std::abs(lhs - rhs));
    }
  rep.identity_residual = resid / std::max(1.0, phi.max_abs());
  rep.phi_psd = psd_check(phi, tol);
  rep.psi_cnd = cnd_check(psi, tol);
  return rep;
}

// ---------------------------------------------------------------------------
// Busemann decomposition (fixed point at infinity)

struct DecompositionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Group multiplication table over explicit labels; no structure is inferred.
struct MultiplicationTable {
  std::vector<std::string> labels;
  std::vector<std::vector<int>> times;  // times[i][j] = index of g_i * g_j

  int index(const std::string& label) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == label) return static_cast<int>(i);
    throw std::invalid_argument("multiplication table: unknown label " + label);
  }

  int inverse(int i, int identity) const {
    for (std::size_t j = 0; j < labels.size(); ++j)
      if (times[i][j] == identity) return static_cast<int>(j);
    throw std::invalid_argument("multiplication table: no inverse for " + labels[i]);
  }
};

struct BusemannReport {
  std::map<std::string, double> psi;
  std::optional<PsdReport> cnd;  // only when a multiplication table is supplied
};

/// Splits F(g) = cosh chi(g) + e^{-chi(g)} Psi(g).  Psi must come out
/// pointwise nonnegative; with a multiplication table, Psi(g_j^{-1} g_k) is
/// additionally checked to be of conditionally negative type.
inline BusemannReport busemann_decompose(
    const std::map<std::string, double>& F, const std::map<std::string, double>& chi,
    const std::string& identity_label,
    const std::optional<MultiplicationTable>& table = std::nullopt, double tol = 1e-9) {
  auto fe = F.find(identity_label);
  auto ce = chi.find(identity_label);
  if (fe == F.end() || ce == chi.end())
    throw std::invalid_argument("busemann_decompose: identity label missing");
  if (std::abs(fe->second - 1.0) > 1e-12 || std::abs(ce->second) > 1e-12)
    throw std::invalid_argument("busemann_decompose: need F(e) = 1 and chi(e) = 0");

  BusemannReport rep;
  for (const auto& [g, f] : F) {
    auto c = chi.find(g);
    if (c == chi.end())
      throw std::invalid_argument("busemann_decompose: chi missing label " + g);
    if (f < 1.0 - tol)
      throw std::invalid_argument("busemann_decompose: F(" + g + ") < 1");
    const double x = c->second;
    const double psi = std::exp(x) * (f - std::cosh(x));
    if (psi < -tol)
      throw DecompositionError("busemann_decompose: Psi(" + g +
                               ") < 0; the action does not fix the asserted boundary point");
    rep.psi[g] = psi;
  }

  if (table) {
    const std::size_t n = table->labels.size();
    if (table->times.size() != n)
      throw std::invalid_argument("busemann_decompose: malformed multiplication table");
    const int e = table->index(identity_label);
    for (std::size_t j = 0; j < n; ++j) {
      if (table->times[j].size() != n || table->times[e][j] != static_cast<int>(j) ||
          table->times[j][e] != static_cast<int>(j))
        throw std::invalid_argument("busemann_decompose: table identity row/column is wrong");
    }
    RealMatrix M(n, n);
    for (std::size_t j = 0; j < n; ++j) {
      const int jin = table->inverse(static_cast<int>(j), e);
      for (std::size_t k = 0; k < n; ++k) {
        const std::string& g = table->labels[table->times[jin][k]];
        auto it = rep.psi.find(g);
        if (it == rep.psi.end())
          throw std::invalid_argument("busemann_decompose: Psi missing label " + g);
        M(j, k) = it->second;
      }
    }
    rep.cnd = cnd_check(M, tol);
  }
  return rep;
}

}  // namespace hypkern
