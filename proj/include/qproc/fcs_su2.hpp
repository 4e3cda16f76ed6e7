#pragma once

// Finitely correlated chain states built from a compatible pair (Lambda,
// Gamma) of unital CP maps, the SU(2)-covariant qubit families with their
// closed-form complete-positivity regions, singlet-density optimization over
// several state classes, and the SU(2)-invariant two-qubit (Werner) family.
//
// Lambda: M_d (x) M_d -> M_d absorbs one site into the memory algebra;
// expectations follow the nesting
//   omega(A_1 (x) ... (x) A_n) = tr[rho Lambda(A_1 (x) Lambda(A_2 (x) ...
//                                 Lambda(A_n (x) 1) ... ))],
// and marginal density matrices are produced by iterating the adjoint of
// Lambda on the memory factor of the state.

#include "qproc/channels.hpp"
#include "qproc/mathcore.hpp"
#include "qproc/optim.hpp"
#include "qproc/parallel.hpp"
#include "qproc/rng.hpp"

#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace qproc {

// ---------------------------------------------------------------------------
// SU(2)-covariant qubit families.

struct Su2Params {
  double alpha = 0.0;
  double mu = 0.0;
  double nu = 0.0;
  double eta = 0.0;

  Su2Params() = default;
  Su2Params(double alpha_, double mu_, double eta_)  // 3-parameter family
      : alpha(alpha_), mu(mu_), nu(mu_), eta(eta_) {}
  Su2Params(double alpha_, double mu_, double nu_, double eta_)
      : alpha(alpha_), mu(mu_), nu(nu_), eta(eta_) {}
};

struct Su2RegionCheck {
  int family = 3;
  bool inside = false;
  double linear_slack = 0.0;     // 3 - |6 mu - alpha|  (or the 4-param form)
  double quadratic_slack = 0.0;  // quadratic constraint value
};

// Closed-form complete-positivity region of the covariant action.
inline Su2RegionCheck su2_region_check(const Su2Params& p, int family) {
  Su2RegionCheck out;
  out.family = family;
  if (family == 3) {
    if (std::abs(p.mu - p.nu) > 1e-14)
      throw domain_error("su2_region_check: the 3-parameter family requires nu == mu");
    out.linear_slack = 3.0 - std::abs(6.0 * p.mu - p.alpha);
    out.quadratic_slack = 3.0 - 2.0 * p.alpha - p.alpha * p.alpha +
                          12.0 * p.mu - 12.0 * p.alpha * p.mu -
                          9.0 * p.eta * p.eta;
  } else if (family == 4) {
    out.linear_slack = 3.0 - std::abs(3.0 * p.mu + 3.0 * p.nu - p.alpha);
    out.quadratic_slack = 3.0 - 2.0 * p.alpha - p.alpha * p.alpha +
                          6.0 * (1.0 - p.alpha) * (p.mu + p.nu) -
                          9.0 * (p.mu - p.nu) * (p.mu - p.nu) -
                          9.0 * p.eta * p.eta;
  } else {
    throw domain_error("su2_region_check: family must be 3 or 4");
  }
  out.inside = out.linear_slack >= -1e-12 && out.quadratic_slack >= -1e-12;
  return out;
}

inline int levi_civita(int a, int b, int c) {
  if (a == b || b == c || a == c) return 0;
  if ((a == 1 && b == 2 && c == 3) || (a == 2 && b == 3 && c == 1) ||
      (a == 3 && b == 1 && c == 2))
    return 1;
  return -1;
}

// The covariant action on M_2 (x) M_2, determined on the Pauli product
// basis by
//   X = 1 (x) 1          -> 1
//   X = sigma_a (x) 1    -> mu  sigma_a
//   X = 1 (x) sigma_a    -> nu  sigma_a
//   X = sigma_a (x) sigma_b -> (alpha/3) delta_ab 1
//                              + (eta/2) sum_c eps_abc sigma_c
// (the symmetric traceless spin-2 part is annihilated).
inline CpMap su2_lambda(const Su2Params& p, int family) {
  const Su2RegionCheck region = su2_region_check(p, family);
  if (!region.inside) {
    std::ostringstream os;
    os << "su2_lambda: parameters outside the CP region of the " << family
       << "-parameter family: ";
    if (region.linear_slack < -1e-12) {
      if (family == 3)
        os << "linear constraint |6*mu - alpha| <= 3 violated (slack "
           << region.linear_slack << ")";
      else
        os << "linear constraint |3*mu + 3*nu - alpha| <= 3 violated (slack "
           << region.linear_slack << ")";
    } else {
      if (family == 3)
        os << "quadratic constraint 3 - 2*alpha - alpha^2 + 12*mu - "
              "12*alpha*mu - 9*eta^2 >= 0 violated (slack "
           << region.quadratic_slack << ")";
      else
        os << "quadratic constraint 3 - 2*alpha - alpha^2 + "
              "6*(1-alpha)*(mu+nu) - 9*(mu-nu)^2 - 9*eta^2 >= 0 violated "
              "(slack "
           << region.quadratic_slack << ")";
    }
    throw domain_error(os.str());
  }

  std::array<Mat, 4> sigma{pauli(0), pauli(1), pauli(2), pauli(3)};
  CpMap lambda = CpMap::from_action(4, 2, [&](const Mat& x) {
    cplx c[4][4];
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        c[a][b] = (kron(sigma[a], sigma[b]) * x).trace() / 4.0;
    Mat out = Mat::Zero(2, 2);
    out += c[0][0] * sigma[0];
    cplx trace_part = 0.0;
    for (int a = 1; a < 4; ++a) {
      out += (p.mu * c[a][0] + p.nu * c[0][a]) * sigma[a];
      trace_part += c[a][a];
    }
    out += (p.alpha / 3.0) * trace_part * sigma[0];
    for (int a = 1; a < 4; ++a)
      for (int b = 1; b < 4; ++b)
        for (int cc = 1; cc < 4; ++cc)
          if (int eps = levi_civita(a, b, cc))
            out += (p.eta / 2.0) * static_cast<double>(eps) * c[a][b] * sigma[cc];
    return out;
  });

  // The closed-form region must agree with positivity of the Choi matrix.
  const PsdReport psd = psd_check(lambda.choi());
  if (!psd.psd) {
    std::ostringstream os;
    os << "su2_lambda: closed-form region check passed but the Choi matrix "
          "has eigenvalue "
       << psd.min_eig;
    throw contract_error(os.str());
  }
  return lambda;
}

// Gamma(X) = mu X + (1-mu) tr(X)/2 * 1, the covariant qubit map with
// Gamma(sigma_a) = mu sigma_a; CP exactly for -1/3 <= mu <= 1.
inline CpMap su2_gamma(double mu) {
  if (mu < -1.0 / 3.0 - 1e-12 || mu > 1.0 + 1e-12)
    throw domain_error("su2_gamma: CP requires -1/3 <= mu <= 1");
  return CpMap::from_action(2, 2, [&](const Mat& x) {
    return Mat(mu * x + (1.0 - mu) * 0.5 * x.trace() * Mat::Identity(2, 2));
  });
}

// ---------------------------------------------------------------------------
// Finitely correlated state specification.

inline double compatibility_residual(const CpMap& lambda, const CpMap& gamma) {
  const int d = gamma.d_in();
  const Mat eye = Mat::Identity(d, d);
  double worst = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const Mat a = matrix_unit(d, i, j);
      const Mat g = gamma.apply(a);
      worst = std::max(worst, (lambda.apply(kron(a, eye)) - g).norm());
      worst = std::max(worst, (lambda.apply(kron(eye, a)) - g).norm());
    }
  return worst;
}

class FcsSpec {
 public:
  // require_compatibility = false admits pairs where Lambda's two slots act
  // differently (used by the period-2 construction); such specs carry
  // compatible() == false and are rejected by the stationary-marginal
  // routines.
  FcsSpec(CpMap lambda, CpMap gamma, DensityMatrix rho,
          bool require_compatibility = true)
      : lambda_(std::move(lambda)),
        gamma_(std::move(gamma)),
        rho_(std::move(rho)) {
    const int d = gamma_.d_in();
    if (gamma_.d_out() != d)
      throw shape_error("FcsSpec: Gamma must be an endomorphism");
    if (lambda_.d_in() != d * d || lambda_.d_out() != d)
      throw shape_error("FcsSpec: Lambda must map M_d (x) M_d to M_d");
    if (rho_.dim() != d)
      throw shape_error("FcsSpec: memory state dimension mismatch");

    const Mat eye = Mat::Identity(d, d);
    const double unital = (lambda_.apply(kron(eye, eye)) - eye).norm();
    if (unital > 1e-10) {
      std::ostringstream os;
      os << "FcsSpec: Lambda is not unital (residual " << unital << ")";
      throw domain_error(os.str());
    }
    if (!psd_check(lambda_.choi()).psd)
      throw domain_error("FcsSpec: Lambda is not completely positive");
    if (!psd_check(gamma_.choi()).psd)
      throw domain_error("FcsSpec: Gamma is not completely positive");

    const Mat evolved = gamma_.adjoint().apply(rho_.matrix());
    const double inv_res = (evolved - rho_.matrix()).norm();
    if (inv_res > 1e-10) {
      std::ostringstream os;
      os << "FcsSpec: memory state is not invariant under Gamma's state "
            "action (residual "
         << inv_res << ")";
      throw domain_error(os.str());
    }

    compat_residual_ = compatibility_residual(lambda_, gamma_);
    compatible_ = compat_residual_ < 1e-10;
    if (require_compatibility && !compatible_) {
      std::ostringstream os;
      os << "FcsSpec: Lambda is not compatible with Gamma (residual "
         << compat_residual_ << ")";
      throw compatibility_error(os.str());
    }
  }

  int d() const { return gamma_.d_in(); }
  const CpMap& lambda() const { return lambda_; }
  const CpMap& gamma() const { return gamma_; }
  const DensityMatrix& rho() const { return rho_; }
  bool compatible() const { return compatible_; }
  double compat_residual() const { return compat_residual_; }

 private:
  CpMap lambda_;
  CpMap gamma_;
  DensityMatrix rho_;
  double compat_residual_ = 0.0;
  bool compatible_ = false;
};

inline double compatibility_residual(const FcsSpec& spec) {
  return compatibility_residual(spec.lambda(), spec.gamma());
}

inline FcsSpec su2_map_build(const Su2Params& p, int family) {
  if (family != 3 && family != 4)
    throw domain_error("su2_map_build: family must be 3 or 4");
  CpMap lambda = su2_lambda(p, family);
  CpMap gamma = su2_gamma(p.mu);
  DensityMatrix rho(0.5 * Mat::Identity(2, 2));
  const bool expect_compatible =
      (family == 3) || std::abs(p.mu - p.nu) <= 1e-12;
  return FcsSpec(std::move(lambda), std::move(gamma), std::move(rho),
                 expect_compatible);
}

// ---------------------------------------------------------------------------
// Expectations and marginals.

// Heisenberg-picture expectation of a product observable, one factor per
// site (index 0 is the leftmost site).
inline double fcs_expectation(const FcsSpec& spec,
                              const std::vector<Mat>& site_ops) {
  const int d = spec.d();
  Mat k = Mat::Identity(d, d);
  for (auto it = site_ops.rbegin(); it != site_ops.rend(); ++it) {
    if (it->rows() != d || it->cols() != d)
      throw shape_error("fcs_expectation: site operator dimension mismatch");
    k = spec.lambda().apply(kron(*it, k));
  }
  return (spec.rho().matrix() * k).trace().real();
}

namespace detail {

// Adjoint of Lambda evaluated on all memory matrix units, plus the same
// with the output's memory slot traced out (used to fuse the final step of
// the marginal construction with the closing trace).
struct ThetaUnits {
  std::vector<Mat> full;    // Theta(E_mn): d^2 x d^2, ordering (site, memory)
  std::vector<Mat> traced;  // tr_memory Theta(E_mn): d x d
};

inline ThetaUnits theta_units(const FcsSpec& spec) {
  const int d = spec.d();
  const CpMap theta = spec.lambda().adjoint();
  ThetaUnits out;
  out.full.resize(static_cast<std::size_t>(d) * d);
  out.traced.resize(static_cast<std::size_t>(d) * d);
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n) {
      Mat t = theta.apply(matrix_unit(d, m, n));
      out.traced[static_cast<std::size_t>(m) * d + n] =
          partial_trace_raw(t, {d, d}, {0});
      out.full[static_cast<std::size_t>(m) * d + n] = std::move(t);
    }
  return out;
}

}  // namespace detail

// Reduced density matrix of n consecutive sites, built in the state picture:
// the memory factor (kept rightmost) is expanded by the adjoint of Lambda
// once per site and traced out in the final step.  Site 0 of the output is
// the leftmost tensor factor.
inline Mat fcs_marginal_raw(const FcsSpec& spec, int n) {
  if (n < 1) throw shape_error("fcs_marginal: n must be >= 1");
  if (!spec.compatible())
    throw domain_error(
        "fcs_marginal: spec is not compatible (Lambda's two slots disagree "
        "with Gamma), so stationary marginals are undefined");
  const int d = spec.d();
  double size = 1.0;
  for (int k = 0; k < n; ++k) {
    size *= d;
    if (size > 4096.0)
      throw size_error("fcs_marginal: d^n exceeds 4096");
  }

  const detail::ThetaUnits units = detail::theta_units(spec);
  Mat cur = spec.rho().matrix();
  long rest = 1;  // dimension of the site factors accumulated so far
  for (int step = 1; step <= n; ++step) {
    const bool last = (step == n);
    const long od = last ? d : static_cast<long>(d) * d;
    Mat next = Mat::Zero(rest * od, rest * od);
    for (int m = 0; m < d; ++m)
      for (int nn = 0; nn < d; ++nn) {
        const Mat& block =
            last ? units.traced[static_cast<std::size_t>(m) * d + nn]
                 : units.full[static_cast<std::size_t>(m) * d + nn];
        for (long r = 0; r < rest; ++r)
          for (long s = 0; s < rest; ++s) {
            const cplx v = cur(r * d + m, s * d + nn);
            if (v == cplx(0.0, 0.0)) continue;
            next.block(r * od, s * od, od, od) += v * block;
          }
      }
    cur = std::move(next);
    rest *= d;
  }

  // Desk-scale cross-check: the state-picture marginal must reproduce the
  // Heisenberg nesting on the complete product matrix-unit basis.
  if (n <= 3) {
    std::vector<int> idx(2 * n, 0);
    const long total = static_cast<long>(std::pow(d, 2 * n));
    for (long flat = 0; flat < total; ++flat) {
      long remv = flat;
      for (int k = 2 * n - 1; k >= 0; --k) {
        idx[k] = static_cast<int>(remv % d);
        remv /= d;
      }
      std::vector<Mat> ops(n);
      long row = 0, col = 0;
      for (int site = 0; site < n; ++site) {
        const int i = idx[2 * site], j = idx[2 * site + 1];
        ops[site] = matrix_unit(d, i, j);
        row = row * d + j;  // tr(M (E_i1j1 (x) ...)) = M[(j...),(i...)]
        col = col * d + i;
      }
      const double direct = fcs_expectation(spec, ops);
      const cplx from_marginal = cur(row, col);
      if (std::abs(from_marginal - direct) > 1e-10) {
        std::ostringstream os;
        os << "fcs_marginal: state-picture marginal disagrees with the "
              "Heisenberg nesting by "
           << std::abs(from_marginal - direct);
        throw contract_error(os.str());
      }
    }
  }
  return cur;
}

inline DensityMatrix fcs_marginal(const FcsSpec& spec, int n) {
  return DensityMatrix(fcs_marginal_raw(spec, n));
}

// Projector onto the two-qubit singlet vector (|10> - |01>)/sqrt(2).
inline Mat singlet_projector() {
  CVec psi = CVec::Zero(4);
  psi(1) = -1.0 / std::sqrt(2.0);
  psi(2) = 1.0 / std::sqrt(2.0);
  return psi * psi.adjoint();
}

// <p> from the two-site marginal; for the covariant qubit families this
// equals (1 - alpha*mu)/4.
inline double singlet_expectation(const FcsSpec& spec) {
  if (spec.d() != 2)
    throw shape_error("singlet_expectation: requires qubit chains");
  const Mat rho2 = fcs_marginal_raw(spec, 2);
  return (rho2 * singlet_projector()).trace().real();
}

inline double su2_singlet_closed_form(const Su2Params& p) {
  return 0.25 * (1.0 - p.alpha * p.mu);
}

struct EntropySequence {
  std::vector<double> H;           // H[k] = entropy of the (k+1)-site marginal
  std::vector<double> increments;  // increments[k] = H_{k+1} - H_k, H_0 := 0
};

// Marginal entropies H_n for n = 1..n_max.  Verifies that H_n is
// non-decreasing and that the increments are non-increasing.
inline EntropySequence fcs_entropy_sequence(const FcsSpec& spec, int n_max) {
  if (n_max < 1) throw shape_error("fcs_entropy_sequence: n_max must be >= 1");
  EntropySequence out;
  out.H.reserve(n_max);
  for (int n = 1; n <= n_max; ++n)
    out.H.push_back(von_neumann_entropy(fcs_marginal(spec, n)));
  double prev = 0.0;
  for (int k = 0; k < n_max; ++k) {
    const double h_before = (k == 0) ? 0.0 : out.H[k - 1];
    const double inc = out.H[k] - h_before;
    if (out.H[k] < h_before - 1e-10)
      throw contract_error("fcs_entropy_sequence: entropies decreased");
    if (k > 0 && inc > prev + 1e-10)
      throw contract_error("fcs_entropy_sequence: increments increased");
    out.increments.push_back(inc);
    prev = inc;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Period-2 construction.

// Mixture singlet density of the alternating chain in closed form.
inline double period2_closed_form(const Su2Params& p1, const Su2Params& p2) {
  return 0.25 - 0.125 * (p2.alpha * p1.mu + p1.alpha * p2.nu);
}

// Explicit alternating construction: insert one site with each map (state
// picture), trace the memory, and average the two phases.  The value equals
// 1/4 - (alpha2*nu1 + alpha1*nu2)/8, which matches period2_closed_form
// whenever each map has mu == nu (and at the optimum, where the differing
// terms vanish).
inline double period2_explicit_value(const Su2Params& p1, const Su2Params& p2) {
  const CpMap theta1 = su2_lambda(p1, 4).adjoint();
  const CpMap theta2 = su2_lambda(p2, 4).adjoint();
  const Mat p = singlet_projector();

  auto phase_value = [&](const CpMap& first, const CpMap& second) {
    // Memory starts (and stays) at 1/2 and always occupies the leftmost
    // factor, so the coherence handed to each new site carries the
    // second-slot weight nu; ordering after two insertions is
    // (memory, site_b, site_a).
    const Mat rho_mem = 0.5 * Mat::Identity(2, 2);
    // First insertion: memory -> (memory', site_a).
    Mat stage1 = Mat::Zero(4, 4);
    for (int m = 0; m < 2; ++m)
      for (int n = 0; n < 2; ++n)
        stage1 += rho_mem(m, n) * first.apply(matrix_unit(2, m, n));
    // Second insertion expands the memory factor (leftmost) of stage1.
    Mat stage2 = Mat::Zero(8, 8);
    for (int m = 0; m < 2; ++m)
      for (int n = 0; n < 2; ++n) {
        Mat block = second.apply(matrix_unit(2, m, n));  // (memory'', site_b)
        for (int r = 0; r < 2; ++r)
          for (int s = 0; s < 2; ++s) {
            const cplx v = stage1(m * 2 + r, n * 2 + s);
            if (v == cplx(0.0, 0.0)) continue;
            for (int pp = 0; pp < 4; ++pp)
              for (int qq = 0; qq < 4; ++qq)
                stage2(pp * 2 + r, qq * 2 + s) += v * block(pp, qq);
          }
      }
    const Mat two_site = partial_trace_raw(stage2, {2, 2, 2}, {1, 2});
    return (two_site * p).trace().real();
  };

  return 0.5 * (phase_value(theta1, theta2) + phase_value(theta2, theta1));
}

// ---------------------------------------------------------------------------
// Werner family.

struct WernerReport {
  Mat state;
  double p_expectation = 0.0;
  double pt_min_eig = 0.0;
};

inline WernerReport werner_analysis(double lambda) {
  if (lambda < 0.0 || lambda > 1.0)
    throw domain_error("werner_analysis: lambda must lie in [0, 1]");
  const Mat p = singlet_projector();
  WernerReport out;
  out.state = (1.0 - lambda) / 3.0 * (Mat::Identity(4, 4) - p) + lambda * p;
  out.p_expectation = (out.state * p).trace().real();
  const Mat pt = partial_transpose(out.state, 2, 2, 1);
  out.pt_min_eig = hermitian_eigenvalues(pt)(0);
  return out;
}

// Location of the sign change of the minimal partial-transpose eigenvalue.
inline double werner_ppt_threshold(double tol = 1e-9) {
  double lo = 0.0, hi = 1.0;
  if (werner_analysis(lo).pt_min_eig < 0.0 || werner_analysis(hi).pt_min_eig > 0.0)
    throw contract_error("werner_ppt_threshold: endpoints do not bracket a sign change");
  while (hi - lo > std::min(tol, 1e-12)) {
    const double mid = 0.5 * (lo + hi);
    if (werner_analysis(mid).pt_min_eig >= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Singlet-density optimization.

enum class SingletMode {
  exchangeable,
  separable,
  su2_stationary,
  period2,
  three_qubit_su2,
};

inline SingletMode singlet_mode_from_string(const std::string& s) {
  if (s == "exchangeable") return SingletMode::exchangeable;
  if (s == "separable") return SingletMode::separable;
  if (s == "su2_stationary") return SingletMode::su2_stationary;
  if (s == "period2") return SingletMode::period2;
  if (s == "three_qubit_su2") return SingletMode::three_qubit_su2;
  throw domain_error("unknown optimization mode: " + s);
}

struct SingletOptimum {
  std::string mode;
  double value = 0.0;
  std::vector<std::pair<std::string, double>> argmax;
};

namespace detail {

inline Mat bloch_state(double x1, double x2, double x3) {
  return 0.5 * (pauli(0) + x1 * pauli(1) + x2 * pauli(2) + x3 * pauli(3));
}

inline void project_ball3(std::vector<double>& x, std::size_t offset) {
  const double n2 = x[offset] * x[offset] + x[offset + 1] * x[offset + 1] +
                    x[offset + 2] * x[offset + 2];
  if (n2 > 1.0) {
    const double inv = 1.0 / std::sqrt(n2);
    for (std::size_t k = 0; k < 3; ++k) x[offset + k] *= inv;
  }
}

inline SingletOptimum optimize_exchangeable(Rng rng) {
  const Mat p = singlet_projector();
  auto objective = [&](const std::vector<double>& x) {
    const Mat rho = bloch_state(x[0], x[1], x[2]);
    return (kron(rho, rho) * p).trace().real();
  };
  auto project = [](std::vector<double>& x) { project_ball3(x, 0); };

  std::vector<std::vector<double>> starts = {
      {0.0, 0.0, 0.0}, {0.6, 0.0, 0.0}, {0.0, 0.6, 0.0}, {0.0, 0.0, 0.6},
      {-0.6, 0.0, 0.0}, {0.0, -0.6, 0.0}, {0.0, 0.0, -0.6}};
  for (int k = 0; k < 8; ++k) {
    double v[3];
    rng.unit_vector3(v);
    const double r = rng.uniform();
    starts.push_back({r * v[0], r * v[1], r * v[2]});
  }
  SingletOptimum best{"exchangeable", -1.0, {}};
  for (const auto& s : starts) {
    const std::vector<double> x = pattern_search_max(s, objective, project, 0.3);
    const double val = objective(x);
    if (val > best.value) {
      best.value = val;
      best.argmax = {{"x1", x[0]}, {"x2", x[1]}, {"x3", x[2]}};
    }
  }
  return best;
}

inline SingletOptimum optimize_separable(Rng rng) {
  const Mat p = singlet_projector();
  auto objective = [&](const std::vector<double>& x) {
    const Mat a = bloch_state(x[0], x[1], x[2]);
    const Mat b = bloch_state(x[3], x[4], x[5]);
    return (kron(a, b) * p).trace().real();
  };
  auto project = [](std::vector<double>& x) {
    project_ball3(x, 0);
    project_ball3(x, 3);
  };

  std::vector<std::vector<double>> starts = {
      {0, 0, 0.9, 0, 0, -0.9}, {0.9, 0, 0, -0.9, 0, 0},
      {0, 0.9, 0, 0, -0.9, 0}, {0.5, 0.5, 0, 0, 0, 0.5}};
  for (int k = 0; k < 16; ++k) {
    std::vector<double> s(6);
    double v[3];
    rng.unit_vector3(v);
    double r = rng.uniform();
    for (int i = 0; i < 3; ++i) s[i] = r * v[i];
    rng.unit_vector3(v);
    r = rng.uniform();
    for (int i = 0; i < 3; ++i) s[3 + i] = r * v[i];
    starts.push_back(std::move(s));
  }
  SingletOptimum best{"separable", -1.0, {}};
  for (const auto& s : starts) {
    const std::vector<double> x = pattern_search_max(s, objective, project, 0.3);
    const double val = objective(x);
    if (val > best.value) {
      best.value = val;
      best.argmax = {{"x1", x[0]}, {"x2", x[1]}, {"x3", x[2]},
                     {"y1", x[3]}, {"y2", x[4]}, {"y3", x[5]}};
    }
  }
  return best;
}

// Largest admissible mu at fixed alpha in the 3-parameter region (eta = 0).
inline double su2_mu_best(double alpha) {
  if (alpha <= 0.0) return (alpha + 3.0) / 6.0;
  return std::max((alpha - 3.0) / 6.0, -(alpha + 3.0) / 12.0);
}

inline SingletOptimum optimize_su2_stationary() {
  auto value = [&](double alpha) {
    return 0.25 * (1.0 - alpha * su2_mu_best(alpha));
  };
  double best_alpha = -3.0;
  double best_val = value(best_alpha);
  const int grid = 4000;
  for (int k = 0; k <= grid; ++k) {
    const double alpha = -3.0 + 4.0 * k / grid;
    const double v = value(alpha);
    if (v > best_val) {
      best_val = v;
      best_alpha = alpha;
    }
  }
  const double lo = std::max(-3.0, best_alpha - 4.0 / grid);
  const double hi = std::min(1.0, best_alpha + 4.0 / grid);
  const double alpha = golden_section_max(value, lo, hi, 1e-12);
  const double mu = su2_mu_best(alpha);
  SingletOptimum out{"su2_stationary", value(alpha), {}};
  out.argmax = {{"alpha", alpha}, {"mu", mu}, {"nu", mu}, {"eta", 0.0}};
  return out;
}

// Feasible range of mu (equivalently nu) at fixed alpha in the 4-parameter
// region with eta = 0, maximized/minimized over the partner coefficient.
inline double p4_mu_max(double alpha) {
  const double r = (alpha + 3.0) * (1.0 - alpha);
  return (alpha + 3.0) / 6.0 + 0.5 * std::sqrt(std::max(r, 0.0) / 3.0);
}

inline double p4_mu_min(double alpha) {
  if (alpha >= -2.0) return -1.0 / 3.0;
  const double r = (alpha + 3.0) * (1.0 - alpha);
  return (alpha + 3.0) / 6.0 - 0.5 * std::sqrt(std::max(r, 0.0) / 3.0);
}

// Partner coefficient completing an extremal (mu or nu) choice; `want_max`
// selects which endpoint of the coefficient interval is being realised.
inline std::pair<double, double> p4_extremal_pair(double alpha, double c) {
  // Returns (chosen, partner) with `chosen` maximizing c * chosen.
  const double r = (alpha + 3.0) * (1.0 - alpha);
  const double root = 0.5 * std::sqrt(std::max(r, 0.0) / 3.0);
  if (c > 1e-13) {
    return {(alpha + 3.0) / 6.0 + root, (alpha + 3.0) / 6.0 - root};
  }
  if (c < -1e-13) {
    if (alpha >= -2.0) return {-1.0 / 3.0, -alpha / 3.0};
    return {(alpha + 3.0) / 6.0 - root, (alpha + 3.0) / 6.0 + root};
  }
  return {(alpha + 3.0) / 6.0, (alpha + 3.0) / 6.0};
}

inline SingletOptimum optimize_period2() {
  auto g = [&](double c, double alpha) {
    return std::max(c * p4_mu_max(alpha), c * p4_mu_min(alpha));
  };
  auto value = [&](double a1, double a2) {
    return 0.25 + 0.125 * (g(-a2, a1) + g(-a1, a2));
  };

  const int grid = 400;
  double best_a1 = 0.0, best_a2 = 0.0, best_val = -1.0;
  for (int i = 0; i <= grid; ++i)
    for (int j = 0; j <= grid; ++j) {
      const double a1 = -3.0 + 4.0 * i / grid;
      const double a2 = -3.0 + 4.0 * j / grid;
      const double v = value(a1, a2);
      if (v > best_val) {
        best_val = v;
        best_a1 = a1;
        best_a2 = a2;
      }
    }
  const std::vector<double> refined = pattern_search_max(
      {best_a1, best_a2},
      [&](const std::vector<double>& x) { return value(x[0], x[1]); },
      [](std::vector<double>& x) {
        for (double& v : x) v = std::min(1.0, std::max(-3.0, v));
      },
      0.02, 1e-10);
  const double a1 = refined[0], a2 = refined[1];

  const auto [mu1, nu1] = p4_extremal_pair(a1, -a2);
  const auto [nu2, mu2] = p4_extremal_pair(a2, -a1);
  const Su2Params p1{a1, mu1, nu1, 0.0};
  const Su2Params p2{a2, mu2, nu2, 0.0};
  if (!su2_region_check(p1, 4).inside || !su2_region_check(p2, 4).inside)
    throw contract_error("optimize_singlet(period2): reconstructed maps left the CP region");
  const double closed = period2_closed_form(p1, p2);
  if (std::abs(closed - value(a1, a2)) > 1e-9)
    throw contract_error("optimize_singlet(period2): closed form disagrees with the reduced objective");

  SingletOptimum out{"period2", closed, {}};
  out.argmax = {{"alpha1", p1.alpha}, {"mu1", p1.mu}, {"nu1", p1.nu},
                {"eta1", p1.eta},     {"alpha2", p2.alpha}, {"mu2", p2.mu},
                {"nu2", p2.nu},       {"eta2", p2.eta}};
  return out;
}

inline SingletOptimum optimize_three_qubit(Rng rng) {
  const Mat p = singlet_projector();
  const Mat p1 = kron(p, Mat::Identity(2, 2));
  const Mat p2 = kron(Mat::Identity(2, 2), p);
  const Mat q = (4.0 / 3.0) * (p1 + p2 - p1 * p2 - p2 * p1);
  const Mat eye8 = Mat::Identity(8, 8);

  // Variables (lambda, a, Im c); b = a enforces <p1> = <p2>, and
  // Re c = 1 - 4a is the normalization constraint.
  auto build = [&](double lam, double a, double imc) {
    const cplx c(1.0 - 4.0 * a, imc);
    return Mat(0.25 * (1.0 - lam) * (eye8 - q) +
               lam * (a * p1 + a * p2 + c * (p1 * p2) +
                      std::conj(c) * (p2 * p1)));
  };
  auto objective = [&](const std::vector<double>& x) {
    const double lam = x[0], a = x[1], imc = x[2];
    const double rec = 1.0 - 4.0 * a;
    if (rec * rec + imc * imc > 4.0 * a * a + 1e-14)
      return -std::numeric_limits<double>::infinity();
    const Mat rho = build(lam, a, imc);
    if (hermitian_eigenvalues(hermitize(rho))(0) < -1e-10)
      return -std::numeric_limits<double>::infinity();
    return (rho * p1).trace().real();
  };
  auto project = [](std::vector<double>& x) {
    x[0] = std::min(1.0, std::max(0.0, x[0]));
    x[1] = std::min(0.75, std::max(0.0, x[1]));
    x[2] = std::min(1.0, std::max(-1.0, x[2]));
  };

  std::vector<std::vector<double>> starts = {{1.0, 0.25, 0.0},
                                             {0.9, 0.3, 0.05},
                                             {0.5, 0.35, -0.1},
                                             {1.0, 0.4, 0.0}};
  for (int k = 0; k < 6; ++k)
    starts.push_back(
        {rng.uniform(), rng.uniform(1.0 / 6.0, 0.5), rng.uniform(-0.2, 0.2)});

  SingletOptimum best{"three_qubit_su2", -1.0, {}};
  bool feasible_found = false;
  for (auto& s : starts) {
    project(s);
    if (!std::isfinite(objective(s))) continue;
    feasible_found = true;
    const std::vector<double> x = pattern_search_max(s, objective, project, 0.2);
    const double val = objective(x);
    if (val > best.value) {
      best.value = val;
      best.argmax = {{"lambda", x[0]},
                     {"a", x[1]},
                     {"b", x[1]},
                     {"re_c", 1.0 - 4.0 * x[1]},
                     {"im_c", x[2]}};
    }
  }
  if (!feasible_found)
    throw contract_error("optimize_singlet(three_qubit_su2): no feasible starting point");

  // <p1> = <p2> must hold at the reported maximizer.
  const Mat rho = build(best.argmax[0].second, best.argmax[1].second,
                        best.argmax[4].second);
  const double gap =
      std::abs((rho * p1).trace().real() - (rho * p2).trace().real());
  if (gap > 1e-12)
    throw contract_error("optimize_singlet(three_qubit_su2): <p1> != <p2> at the maximizer");
  return best;
}

}  // namespace detail

inline SingletOptimum optimize_singlet(SingletMode mode, std::uint64_t seed = 0) {
  Rng rng = Rng(seed).stream("optimize_singlet");
  switch (mode) {
    case SingletMode::exchangeable:
      return detail::optimize_exchangeable(rng);
    case SingletMode::separable:
      return detail::optimize_separable(rng);
    case SingletMode::su2_stationary:
      return detail::optimize_su2_stationary();
    case SingletMode::period2:
      return detail::optimize_period2();
    case SingletMode::three_qubit_su2:
      return detail::optimize_three_qubit(rng);
  }
  throw domain_error("optimize_singlet: unknown mode");
}

inline SingletOptimum optimize_singlet(const std::string& mode,
                                       std::uint64_t seed = 0) {
  return optimize_singlet(singlet_mode_from_string(mode), seed);
}

}  // namespace qproc
