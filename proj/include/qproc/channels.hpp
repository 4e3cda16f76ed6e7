#pragma once

// Quantum channels via their Choi encoding, covariance residuals, Davies
// maps with detailed balance, and a minimum-output-entropy search.
//
// Convention: maps are stored in the Heisenberg (observable) picture unless
// stated otherwise; the Schroedinger (state) action is the adjoint with
// respect to the trace pairing.  The Choi matrix of Gamma: M_din -> M_dout
// is C = sum_ij |i><j| (x) Gamma(|i><j|), with the input factor first.

#include "qproc/classical.hpp"
#include "qproc/mathcore.hpp"
#include "qproc/optim.hpp"
#include "qproc/parallel.hpp"
#include "qproc/rng.hpp"

#include <functional>
#include <optional>

namespace qproc {

class CpMap {
 public:
  CpMap(int d_in, int d_out, const Mat& choi)
      : d_in_(d_in), d_out_(d_out) {
    if (d_in < 1 || d_out < 1) throw shape_error("CpMap: dimensions must be >= 1");
    const long n = static_cast<long>(d_in) * d_out;
    if (choi.rows() != n || choi.cols() != n)
      throw shape_error("CpMap: Choi matrix size does not match d_in*d_out");
    const double scale = std::max(1.0, choi.cwiseAbs().maxCoeff());
    if ((choi - choi.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
      throw domain_error("CpMap: Choi matrix is not hermitian");
    choi_ = hermitize(choi);
  }

  // Encode a linear map from its action on matrix units |i><j|.
  static CpMap from_action(int d_in, int d_out,
                           const std::function<Mat(const Mat&)>& action) {
    const long n = static_cast<long>(d_in) * d_out;
    Mat choi = Mat::Zero(n, n);
    for (int i = 0; i < d_in; ++i)
      for (int j = 0; j < d_in; ++j) {
        const Mat out = action(matrix_unit(d_in, i, j));
        if (out.rows() != d_out || out.cols() != d_out)
          throw shape_error("CpMap: action output has wrong dimension");
        choi.block(static_cast<long>(i) * d_out, static_cast<long>(j) * d_out,
                   d_out, d_out) = out;
      }
    return CpMap(d_in, d_out, choi);
  }

  int d_in() const { return d_in_; }
  int d_out() const { return d_out_; }
  const Mat& choi() const { return choi_; }

  // Gamma(X)[a,b] = sum_ij X[i,j] C[(i,a),(j,b)].
  Mat apply(const Mat& x) const {
    if (x.rows() != d_in_ || x.cols() != d_in_)
      throw shape_error("CpMap: argument dimension does not match d_in");
    Mat out = Mat::Zero(d_out_, d_out_);
    for (int i = 0; i < d_in_; ++i)
      for (int j = 0; j < d_in_; ++j) {
        const cplx c = x(i, j);
        if (c == cplx(0.0, 0.0)) continue;
        out += c * choi_.block(static_cast<long>(i) * d_out_,
                               static_cast<long>(j) * d_out_, d_out_, d_out_);
      }
    return out;
  }

  // Adjoint with respect to <X, Gamma(Y)> = <Gamma*(X), Y> under the trace
  // pairing; maps M_dout -> M_din.  C*(a i, b j) = C(j b, i a).
  CpMap adjoint() const {
    const long n = static_cast<long>(d_in_) * d_out_;
    Mat c(n, n);
    for (int a = 0; a < d_out_; ++a)
      for (int i = 0; i < d_in_; ++i)
        for (int b = 0; b < d_out_; ++b)
          for (int j = 0; j < d_in_; ++j)
            c(static_cast<long>(a) * d_in_ + i,
              static_cast<long>(b) * d_in_ + j) =
                choi_(static_cast<long>(j) * d_out_ + b,
                      static_cast<long>(i) * d_out_ + a);
    return CpMap(d_out_, d_in_, c);
  }

 private:
  int d_in_;
  int d_out_;
  Mat choi_;
};

inline Mat apply_cp(const CpMap& m, const Mat& x) { return m.apply(x); }

struct CpProperties {
  bool cp = false;
  double choi_min_eig = 0.0;
  double unital_residual = 0.0;            // ||Gamma(1) - 1||_F
  double trace_preserving_residual = 0.0;  // ||tr_out Choi - 1||_F
};

inline CpProperties cp_properties(const CpMap& m, double tol = tol_psd) {
  CpProperties out;
  const PsdReport psd = psd_check(m.choi(), tol);
  out.cp = psd.psd;
  out.choi_min_eig = psd.min_eig;
  out.unital_residual =
      (m.apply(Mat::Identity(m.d_in(), m.d_in())) -
       Mat::Identity(m.d_out(), m.d_out()))
          .norm();
  const Mat tr_out =
      partial_trace_raw(m.choi(), {m.d_in(), m.d_out()}, {0});
  out.trace_preserving_residual =
      (tr_out - Mat::Identity(m.d_in(), m.d_in())).norm();
  return out;
}

// Max over the supplied (U_in, U_out) pairs of the Frobenius norm of
// [conj(U_in) (x) U_out, Choi]; zero exactly when the map is covariant.
inline double covariance_residual(
    const CpMap& m, const std::vector<std::pair<Mat, Mat>>& group_elements) {
  double worst = 0.0;
  for (const auto& [u_in, u_out] : group_elements) {
    if (u_in.rows() != m.d_in() || u_in.cols() != m.d_in() ||
        u_out.rows() != m.d_out() || u_out.cols() != m.d_out())
      throw shape_error("covariance_residual: unitary dimensions do not match map");
    const Mat w = kron(u_in.conjugate(), u_out);
    worst = std::max(worst, (w * m.choi() - m.choi() * w).norm());
  }
  return worst;
}

// Haar SU(2) sample pairs (U^(x)k_in, U^(x)k_out) for maps whose dims are
// powers of two, suitable for covariance_residual.
inline std::vector<std::pair<Mat, Mat>> su2_sample_pairs(int d_in, int d_out,
                                                         int count, Rng rng) {
  auto tensor_power = [](const Mat& u, int dim) {
    Mat out = Mat::Identity(1, 1);
    int d = 1;
    while (d < dim) {
      out = kron(out, u);
      d *= 2;
    }
    if (d != dim)
      throw shape_error("su2_sample_pairs: dimension is not a power of two");
    return out;
  };
  std::vector<std::pair<Mat, Mat>> pairs;
  pairs.reserve(count);
  for (int k = 0; k < count; ++k) {
    const Mat u = rng.haar_unitary(2);
    pairs.emplace_back(tensor_power(u, d_in), tensor_power(u, d_out));
  }
  return pairs;
}

// ---------------------------------------------------------------------------
// Davies maps: diagonal action by a stochastic matrix T, off-diagonal
// damping by a real symmetric D.

inline void require_damping_matrix(const StochasticMatrix& t, const RMat& d) {
  if (d.rows() != t.dim() || d.cols() != t.dim())
    throw shape_error("Davies map: D size does not match T");
  if ((d - d.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw shape_error("Davies map: D must be symmetric");
}

// Heisenberg action: diagonals evolve by dia(phi) -> dia(T phi), the
// off-diagonal entry (i, j) is damped by the factor D_ij.
inline CpMap davies_build(const StochasticMatrix& t, const RMat& d) {
  require_damping_matrix(t, d);
  const int n = t.dim();
  return CpMap::from_action(n, n, [&](const Mat& x) {
    Mat out = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) {
          for (int k = 0; k < n; ++k) out(i, i) += t.matrix()(i, k) * x(k, k);
        } else {
          out(i, j) = d(i, j) * x(i, j);
        }
      }
    return out;
  });
}

// The mixed T/D matrix whose positivity decides complete positivity:
// diagonal T_ii, off-diagonal D_ij.
inline Mat davies_cp_matrix(const StochasticMatrix& t, const RMat& d) {
  require_damping_matrix(t, d);
  const int n = t.dim();
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m(i, j) = (i == j) ? t.matrix()(i, i) : d(i, j);
  return m;
}

struct DaviesReport {
  double detailed_balance_residual = 0.0;  // max |mu_i T_ij - mu_j T_ji|
  double triangle_residual = 0.0;  // max |T_ij T_jk T_ki - T_ik T_kj T_ji|
  double cp_matrix_min_eig = 0.0;  // smallest eigenvalue of the mixed matrix
  bool cp = false;                 // mixed matrix PSD
  double choi_min_eig = 0.0;
  bool choi_psd = false;
  bool cp_tests_agree = false;  // mixed-matrix test vs Choi test
  double unital_residual = 0.0;
  double trace_preserving_residual = 0.0;
  RVec mu;  // stationary measure used for detailed balance
};

inline DaviesReport davies_validate(const StochasticMatrix& t, const RMat& d,
                                    std::optional<ProbVector> mu = std::nullopt) {
  require_damping_matrix(t, d);
  const int n = t.dim();
  DaviesReport rep;
  const ProbVector measure =
      mu ? *mu : invariant_measure(t, /*allow_degenerate=*/true);
  if (mu) check_stationarity(t, measure);
  rep.mu = measure.values();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      rep.detailed_balance_residual = std::max(
          rep.detailed_balance_residual,
          std::abs(measure[i] * t.matrix()(i, j) - measure[j] * t.matrix()(j, i)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        rep.triangle_residual =
            std::max(rep.triangle_residual,
                     std::abs(t.matrix()(i, j) * t.matrix()(j, k) * t.matrix()(k, i) -
                              t.matrix()(i, k) * t.matrix()(k, j) * t.matrix()(j, i)));
  const PsdReport mixed = psd_check(davies_cp_matrix(t, d));
  rep.cp = mixed.psd;
  rep.cp_matrix_min_eig = mixed.min_eig;
  const CpMap channel = davies_build(t, d);
  const CpProperties props = cp_properties(channel);
  rep.choi_psd = props.cp;
  rep.choi_min_eig = props.choi_min_eig;
  rep.cp_tests_agree = (rep.cp == rep.choi_psd);
  rep.unital_residual = props.unital_residual;
  rep.trace_preserving_residual = props.trace_preserving_residual;
  return rep;
}

// Qubit Davies family: T = [[1-a, a], [b, 1-b]], off-diagonal damping d_off.
struct DaviesQubit {
  StochasticMatrix t;
  RMat d;
};

inline DaviesQubit davies_qubit(double a, double b, double d_off) {
  RMat t(2, 2);
  t << 1.0 - a, a, b, 1.0 - b;
  RMat d(2, 2);
  d << 1.0, d_off, d_off, 1.0;
  return DaviesQubit{StochasticMatrix(t), d};
}

// The qubit map generates a process exactly when d_off^2 <= (1-a)(1-b)/2.
inline bool davies_process_condition(double a, double b, double d_off) {
  if (!(0.0 <= b && b <= a && a <= 1.0)) {
    std::ostringstream os;
    os << "davies_process_condition: parameters must satisfy 0 <= b <= a <= 1 "
          "(got a="
       << a << ", b=" << b << ")";
    throw domain_error(os.str());
  }
  return d_off * d_off <= 0.5 * (1.0 - a) * (1.0 - b);
}

// ---------------------------------------------------------------------------
// Minimum output entropy over pure inputs.

struct MinEntropyResult {
  double value = 0.0;
  CVec state;  // argmin pure state
};

// Multi-start coordinate pattern search on the unit sphere of pure states.
// The map must be CP and trace preserving (a state-picture channel).
inline MinEntropyResult min_output_entropy_search(const CpMap& m,
                                                  int restarts = 50,
                                                  std::uint64_t seed = 0,
                                                  double tol = 1e-9) {
  const CpProperties props = cp_properties(m);
  if (!props.cp)
    throw contract_error("min_output_entropy_search: map is not CP");
  if (props.trace_preserving_residual > 1e-9)
    throw contract_error(
        "min_output_entropy_search: map is not trace preserving (state-"
        "picture action required)");
  const int d = m.d_in();

  // Output spectra sit within the validated CP/TP slack of [0, 1]; clip a
  // little wider than the state-validation tolerance so the search cannot
  // abort on 1e-10-scale negativity.
  auto entropy_of = [&](const CVec& psi) {
    const Mat rho_out = hermitize(m.apply(psi * psi.adjoint()));
    const RVec ev = hermitian_eigenvalues(rho_out);
    double h = 0.0;
    for (int i = 0; i < ev.size(); ++i) h -= xlogx(std::max(ev(i), 0.0));
    return h;
  };
  auto unpack = [&](const std::vector<double>& x) {
    CVec psi(d);
    for (int i = 0; i < d; ++i) psi(i) = cplx(x[2 * i], x[2 * i + 1]);
    const double n = psi.norm();
    return (n > 1e-12) ? CVec(psi / n) : CVec(CVec::Unit(d, 0));
  };

  std::vector<CVec> starts;
  for (int i = 0; i < d && static_cast<int>(starts.size()) < restarts; ++i)
    starts.push_back(CVec::Unit(d, i));
  Rng rng = Rng(seed).stream("min_output_entropy");
  while (static_cast<int>(starts.size()) < restarts) {
    CVec psi = rng.ginibre(d, 1);
    starts.push_back(psi / psi.norm());
  }

  std::vector<MinEntropyResult> results(starts.size());
  parallel_for(static_cast<int>(starts.size()), [&](int s) {
    std::vector<double> x(2 * d);
    for (int i = 0; i < d; ++i) {
      x[2 * i] = starts[s](i).real();
      x[2 * i + 1] = starts[s](i).imag();
    }
    const std::vector<double> best = pattern_search_max(
        x,
        [&](const std::vector<double>& y) { return -entropy_of(unpack(y)); },
        [](std::vector<double>&) {}, 0.5, std::max(tol, 1e-10));
    results[s].state = unpack(best);
    results[s].value = entropy_of(results[s].state);
  });

  MinEntropyResult out = results[0];
  for (const MinEntropyResult& r : results)
    if (r.value < out.value - 1e-15) out = r;
  return out;
}

}  // namespace qproc
