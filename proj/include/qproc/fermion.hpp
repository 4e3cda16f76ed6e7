#pragma once

// Free-fermionic processes described at the level of symbols: quasi-free CP
// maps Q -> A^† Q A + B, their compatible extensions, the invariant symbol,
// the block Toeplitz correlation operator of the stationary chain state, its
// closed-form symbol function on the circle, Szegő-type limit checks, and
// entropy rates (both by quadrature of the symbol entropy and by truncated
// correlation matrices).

#include "qproc/mathcore.hpp"
#include "qproc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace qproc {

// ---------------------------------------------------------------------------
// Symbols and quasi-free CP maps.

// One-mode-sector description of a gauge-invariant quasi-free state: a
// hermitian matrix with spectrum in [0, 1].
class Symbol {
 public:
  explicit Symbol(Mat q, double tol = 1e-10) : q_(std::move(q)) {
    if (q_.rows() != q_.cols()) throw shape_error("Symbol: matrix must be square");
    if (!is_hermitian(q_, tol_herm))
      throw domain_error("Symbol: matrix is not hermitian");
    q_ = hermitize(q_);
    eigs_ = hermitian_eigenvalues(q_);
    if (eigs_(0) < -tol || eigs_(eigs_.size() - 1) > 1.0 + tol) {
      std::ostringstream os;
      os << "Symbol: spectrum [" << eigs_(0) << ", " << eigs_(eigs_.size() - 1)
         << "] leaves [0, 1] beyond tolerance " << tol;
      throw contract_error(os.str());
    }
  }

  int dim() const { return static_cast<int>(q_.rows()); }
  const Mat& matrix() const { return q_; }
  const RVec& eigenvalues() const { return eigs_; }

 private:
  Mat q_;
  RVec eigs_;
};

struct FreeCpMap {
  Mat A;
  Mat B;
};

struct FreeCpReport {
  bool valid = false;
  bool b_psd = false;          // 0 <= B
  bool contraction = false;    // B <= 1 - A^† A
  double b_min_eig = 0.0;
  double contraction_min_eig = 0.0;  // lambda_min(1 - A^† A - B)
};

inline FreeCpReport free_cp_validate(const Mat& a, const Mat& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw shape_error("free_cp_validate: A and B must be square with equal dimension");
  if (!is_hermitian(b, tol_herm))
    throw domain_error("free_cp_validate: B must be hermitian");
  FreeCpReport out;
  const PsdReport bp = psd_check(b);
  out.b_psd = bp.psd;
  out.b_min_eig = bp.min_eig;
  const Mat gap = Mat::Identity(a.rows(), a.cols()) - a.adjoint() * a - b;
  const PsdReport cp = psd_check(hermitize(gap));
  out.contraction = cp.psd;
  out.contraction_min_eig = cp.min_eig;
  out.valid = out.b_psd && out.contraction;
  return out;
}

inline FreeCpReport free_cp_validate(const FreeCpMap& m) {
  return free_cp_validate(m.A, m.B);
}

inline Symbol free_cp_apply(const FreeCpMap& m, const Symbol& q) {
  const FreeCpReport rep = free_cp_validate(m);
  if (!rep.valid) {
    std::ostringstream os;
    os << "free_cp_apply: invalid map (lambda_min(B) = " << rep.b_min_eig
       << ", lambda_min(1 - A*A - B) = " << rep.contraction_min_eig << ")";
    throw contract_error(os.str());
  }
  if (q.dim() != m.A.rows())
    throw shape_error("free_cp_apply: symbol dimension mismatch");
  return Symbol(m.A.adjoint() * q.matrix() * m.A + m.B);
}

// Semi-direct product: the composite applies `first` and then `second`,
//   Q -> A2^† (A1^† Q A1 + B1) A2 + B2 = (A1 A2)^† Q (A1 A2) + (B2 + A2^† B1 A2).
inline FreeCpMap free_cp_compose(const FreeCpMap& first, const FreeCpMap& second) {
  if (first.A.rows() != second.A.rows())
    throw shape_error("free_cp_compose: dimension mismatch");
  FreeCpMap out;
  out.A = first.A * second.A;
  out.B = hermitize(second.B + second.A.adjoint() * first.B * second.A);
  return out;
}

// ---------------------------------------------------------------------------
// Compatible extensions and the invariant symbol.

struct ExtensionReport {
  bool exists = false;    // A^†A <= 1/2 and A^†A <= 1 - B
  bool cd_valid = false;  // 0 <= D and D <= 1 - C^†C for C = (A A), D = [[B,X],[X^†,B]]
  double half_min_eig = 0.0;      // lambda_min(1/2 - A^†A)
  double one_b_min_eig = 0.0;     // lambda_min(1 - B - A^†A)
  double d_min_eig = 0.0;         // lambda_min(D)
  double cd_gap_min_eig = 0.0;    // lambda_min(1 - C^†C - D)
};

inline ExtensionReport extension_check(const Mat& a, const Mat& b, const Mat& x) {
  const auto d = a.rows();
  if (a.cols() != d || b.rows() != d || b.cols() != d || x.rows() != d || x.cols() != d)
    throw shape_error("extension_check: all inputs must be square d x d");
  if (!is_hermitian(b, tol_herm))
    throw domain_error("extension_check: B must be hermitian");
  ExtensionReport out;
  const Mat asa = a.adjoint() * a;
  const Mat eye = Mat::Identity(d, d);
  const PsdReport half = psd_check(hermitize(0.5 * eye - asa));
  const PsdReport oneb = psd_check(hermitize(eye - b - asa));
  out.half_min_eig = half.min_eig;
  out.one_b_min_eig = oneb.min_eig;
  out.exists = half.psd && oneb.psd;

  Mat dmat(2 * d, 2 * d);
  dmat << b, x, x.adjoint(), b;
  const PsdReport dp = psd_check(hermitize(dmat));
  out.d_min_eig = dp.min_eig;
  // C = (A A) horizontally, so C^†C has the 2x2 block pattern filled by A^†A.
  Mat csc(2 * d, 2 * d);
  csc << asa, asa, asa, asa;
  const PsdReport gap = psd_check(hermitize(Mat::Identity(2 * d, 2 * d) - csc - dmat));
  out.cd_gap_min_eig = gap.min_eig;
  out.cd_valid = dp.psd && gap.psd;
  return out;
}

inline double spectral_radius(const Mat& a) {
  Eigen::ComplexEigenSolver<Mat> es(a, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Unique solution of Q = A^† Q A + B (spectral radius of A below one):
// vectorized linear solve, with fixed-point iteration as a fallback when the
// direct solve leaves a residual.
inline Symbol invariant_symbol(const Mat& a, const Mat& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw shape_error("invariant_symbol: A and B must be square with equal dimension");
  const double sr = spectral_radius(a);
  if (sr >= 1.0 - 1e-12) {
    std::ostringstream os;
    os << "invariant_symbol: A is non-contractive (spectral radius " << sr
       << " >= 1), the fixed point is not unique";
    throw domain_error(os.str());
  }
  const auto d = a.rows();
  const auto d2 = d * d;
  // Column-major vec: vec(A^† Q A) = (A^T (x) A^†) vec(Q).
  const Mat system =
      Mat::Identity(d2, d2) - kron(Mat(a.transpose()), Mat(a.adjoint()));
  Eigen::Map<const CVec> bvec(b.data(), d2);
  CVec qvec = system.partialPivLu().solve(bvec);
  Mat q = hermitize(Eigen::Map<const Mat>(qvec.data(), d, d));

  auto residual = [&](const Mat& m) {
    return (m - a.adjoint() * m * a - b).norm();
  };
  if (residual(q) >= 1e-12) {
    // Fixed-point fallback: the iteration contracts at rate sr(A)^2.
    q = hermitize(b);
    for (int it = 0; it < 200000; ++it) {
      const Mat next = hermitize(a.adjoint() * q * a + b);
      const double delta = (next - q).norm();
      q = next;
      if (delta < 1e-16 * std::max(1.0, q.norm())) break;
    }
  }
  const double res = residual(q);
  if (res >= 1e-12) {
    std::ostringstream os;
    os << "invariant_symbol: fixed-point residual " << res << " exceeds 1e-12";
    throw contract_error(os.str());
  }
  return Symbol(q);
}

// ---------------------------------------------------------------------------
// Stationary fermionic process.

struct FermionProcessSpec {
  int d = 0;
  Mat A;
  Mat B;
  Mat X;
  Mat Q;  // invariant symbol
};

inline FermionProcessSpec fermion_process(const Mat& a, const Mat& b, const Mat& x) {
  const FreeCpReport map_rep = free_cp_validate(a, b);
  if (!map_rep.valid) {
    std::ostringstream os;
    os << "fermion_process: (A, B) is not a valid quasi-free map "
          "(lambda_min(B) = "
       << map_rep.b_min_eig << ", lambda_min(1 - A*A - B) = "
       << map_rep.contraction_min_eig << ")";
    throw domain_error(os.str());
  }
  const ExtensionReport ext = extension_check(a, b, x);
  if (!ext.exists) {
    std::ostringstream os;
    os << "fermion_process: no compatible extension exists "
          "(lambda_min(1/2 - A*A) = "
       << ext.half_min_eig << ", lambda_min(1 - B - A*A) = " << ext.one_b_min_eig
       << ")";
    throw domain_error(os.str());
  }
  if (!ext.cd_valid) {
    std::ostringstream os;
    os << "fermion_process: X does not label a valid extension "
          "(lambda_min(D) = "
       << ext.d_min_eig << ", lambda_min(1 - C*C - D) = " << ext.cd_gap_min_eig
       << ")";
    throw domain_error(os.str());
  }
  FermionProcessSpec spec;
  spec.d = static_cast<int>(a.rows());
  spec.A = a;
  spec.B = hermitize(b);
  spec.X = x;
  spec.Q = invariant_symbol(a, b).matrix();
  return spec;
}

// n-block truncation of the stationary correlation operator: block Toeplitz
// with (Q_inf)_{ii} = Q and (Q_inf)_{i,i+k} = (A^†)^k (Q - B + X).
inline Mat qinf_truncation(const FermionProcessSpec& spec, int n) {
  if (n < 1) throw shape_error("qinf_truncation: n must be >= 1");
  if (static_cast<long>(n) * spec.d > 4000)
    throw size_error("qinf_truncation: n*d exceeds 4000");
  const int d = spec.d;
  const Mat f = spec.Q - spec.B + spec.X;
  Mat out = Mat::Zero(static_cast<long>(n) * d, static_cast<long>(n) * d);
  Mat power = Mat::Identity(d, d);  // (A^†)^k
  std::vector<Mat> upper(n);
  upper[0] = spec.Q;
  for (int k = 1; k < n; ++k) {
    power = spec.A.adjoint() * power;
    upper[k] = power * f;
  }
  for (int i = 0; i < n; ++i) {
    out.block(i * d, i * d, d, d) = spec.Q;
    for (int k = 1; i + k < n; ++k) {
      out.block(i * d, (i + k) * d, d, d) = upper[k];
      out.block((i + k) * d, i * d, d, d) = upper[k].adjoint();
    }
  }
  const RVec eigs = hermitian_eigenvalues(hermitize(out));
  if (eigs(0) < -1e-9 || eigs(eigs.size() - 1) > 1.0 + 1e-9) {
    std::ostringstream os;
    os << "qinf_truncation: truncated correlation operator has spectrum ["
       << eigs(0) << ", " << eigs(eigs.size() - 1) << "] outside [0, 1]";
    throw contract_error(os.str());
  }
  return hermitize(out);
}

// Closed-form symbol of the stationary process,
//   Q_inf(theta) = Q + W (1 - W)^{-1} F + h.c.,  W = A^† e^{i theta},
// whose Fourier coefficients reproduce the Toeplitz blocks above.
inline Mat symbol_function(const FermionProcessSpec& spec, double theta) {
  const int d = spec.d;
  const Mat w = spec.A.adjoint() * std::exp(cplx(0.0, theta));
  Eigen::FullPivLU<Mat> lu(Mat::Identity(d, d) - w);
  if (!lu.isInvertible())
    throw domain_error(
        "symbol_function: resolvent (1 - A^† e^{i theta}) is singular; the "
        "spectral radius of A must be < 1");
  const Mat f = spec.Q - spec.B + spec.X;
  const Mat half = w * lu.solve(f);
  return hermitize(spec.Q + half + half.adjoint());
}

// ---------------------------------------------------------------------------
// Entropies.

// H(Q) = -tr[Q log Q + (1-Q) log(1-Q)] in nats, from a hermitian matrix with
// spectrum in [0, 1] up to `tol`.
inline double symbol_entropy(const Mat& q, double tol) {
  if (!is_hermitian(q, tol_herm))
    throw domain_error("symbol_entropy: matrix is not hermitian");
  const RVec eigs = hermitian_eigenvalues(hermitize(q));
  double h = 0.0;
  for (Eigen::Index i = 0; i < eigs.size(); ++i) {
    const double lam = eigs(i);
    if (lam < -tol || lam > 1.0 + tol) {
      std::ostringstream os;
      os << "symbol_entropy: eigenvalue " << lam << " outside [0, 1] beyond "
         << tol;
      throw contract_error(os.str());
    }
    const double clipped = std::min(1.0, std::max(0.0, lam));
    h -= xlogx(clipped) + xlogx(1.0 - clipped);
  }
  return h;
}

inline double symbol_entropy(const Symbol& q) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < q.eigenvalues().size(); ++i) {
    const double lam = std::min(1.0, std::max(0.0, q.eigenvalues()(i)));
    h -= xlogx(lam) + xlogx(1.0 - lam);
  }
  return h;
}

namespace detail {

// Average of a function over a uniform periodic grid on [-pi, pi).
template <typename F>
double periodic_average(F&& f, int points) {
  std::vector<double> vals(static_cast<std::size_t>(points));
  parallel_for(points, [&](int j) {
    const double theta = -pi_const + 2.0 * pi_const * j / points;
    vals[static_cast<std::size_t>(j)] = f(theta);
  });
  double sum = 0.0;
  for (double v : vals) sum += v;
  return sum / points;
}

}  // namespace detail

struct QuadratureResult {
  double value = 0.0;
  int points = 0;
  double last_delta = 0.0;
  bool converged = false;
};

// (1/2pi) Integral of H(Q_inf(theta)) over the circle at a fixed number of
// uniform quadrature points (trapezoid rule; spectrally accurate here).
inline double entropy_rate_integral(const FermionProcessSpec& spec, int points) {
  if (points < 1) throw shape_error("entropy_rate_integral: points must be >= 1");
  return detail::periodic_average(
      [&](double theta) { return symbol_entropy(symbol_function(spec, theta), 1e-9); },
      points);
}

// Doubling quadrature: 2^6 points upward until successive averages agree to
// `tol` (or 2^16 points).
inline QuadratureResult entropy_rate_integral_adaptive(
    const FermionProcessSpec& spec, double tol = 1e-8) {
  QuadratureResult out;
  int points = 1 << 6;
  double prev = entropy_rate_integral(spec, points);
  for (int k = 7; k <= 16; ++k) {
    points = 1 << k;
    const double cur = entropy_rate_integral(spec, points);
    out.last_delta = std::abs(cur - prev);
    prev = cur;
    if (out.last_delta < tol) {
      out.converged = true;
      break;
    }
  }
  out.value = prev;
  out.points = points;
  return out;
}

struct TruncationEntropy {
  std::vector<double> H;          // H[k] = entropy of the (k+1)-block truncation
  std::vector<double> average;    // H_n / n
  std::vector<double> increment;  // H_n - H_{n-1} (with H_0 = 0)
};

// Entropies of the truncated correlation operators for 1..n blocks.
inline TruncationEntropy entropy_rate_truncation(const FermionProcessSpec& spec, int n) {
  if (n < 1) throw shape_error("entropy_rate_truncation: n must be >= 1");
  if (static_cast<long>(n) * spec.d > 4000)
    throw size_error("entropy_rate_truncation: n*d exceeds 4000");
  TruncationEntropy out;
  out.H.resize(static_cast<std::size_t>(n));
  parallel_for(n, [&](int k) {
    out.H[static_cast<std::size_t>(k)] =
        symbol_entropy(qinf_truncation(spec, k + 1), 1e-9);
  });
  out.average.resize(out.H.size());
  out.increment.resize(out.H.size());
  for (std::size_t k = 0; k < out.H.size(); ++k) {
    out.average[k] = out.H[k] / static_cast<double>(k + 1);
    out.increment[k] = out.H[k] - (k == 0 ? 0.0 : out.H[k - 1]);
  }
  return out;
}

// Single increment H_n - H_{n-1} without the full sweep.
inline double truncation_increment(const FermionProcessSpec& spec, int n) {
  if (n < 1) throw shape_error("truncation_increment: n must be >= 1");
  const double h_prev =
      (n == 1) ? 0.0 : symbol_entropy(qinf_truncation(spec, n - 1), 1e-9);
  return symbol_entropy(qinf_truncation(spec, n), 1e-9) - h_prev;
}

// ---------------------------------------------------------------------------
// Toeplitz symbols and Szegő-type limits.

// A hermitian-matrix-valued function on [-pi, pi), available pointwise and
// through its Fourier coefficients That(k) = (1/2pi) Integral T(theta)
// e^{-ik theta} dtheta; the n-block compression is the block Toeplitz matrix
// with blocks M_{j,k} = That(k - j).
class ToeplitzSymbolFn {
 public:
  static ToeplitzSymbolFn from_function(int d, std::function<Mat(double)> f,
                                        int quadrature_points = 1 << 12) {
    ToeplitzSymbolFn out;
    out.d_ = d;
    out.fn_ = std::move(f);
    out.quad_points_ = quadrature_points;
    return out;
  }

  // Missing coefficients are zero (finite-bandwidth symbol).
  static ToeplitzSymbolFn from_coefficients(int d, std::map<int, Mat> coeffs) {
    ToeplitzSymbolFn out;
    out.d_ = d;
    for (auto& [k, m] : coeffs) {
      if (m.rows() != d || m.cols() != d)
        throw shape_error("ToeplitzSymbolFn: coefficient dimension mismatch");
      out.coeffs_[k] = m;
    }
    out.banded_ = true;
    return out;
  }

  static ToeplitzSymbolFn from_process(const FermionProcessSpec& spec) {
    ToeplitzSymbolFn out;
    out.d_ = spec.d;
    out.process_ = spec;
    out.fn_ = [spec](double theta) { return symbol_function(spec, theta); };
    return out;
  }

  // T(theta) = 1/2 + (1/5) cos(theta) + (1/3) sin(2 theta), given by its five
  // exact Fourier coefficients.
  static ToeplitzSymbolFn figure1() {
    std::map<int, Mat> c;
    auto scalar = [](cplx v) { return Mat::Constant(1, 1, v); };
    c[0] = scalar(0.5);
    c[1] = scalar(0.1);
    c[-1] = scalar(0.1);
    c[2] = scalar(cplx(0.0, -1.0 / 6.0));
    c[-2] = scalar(cplx(0.0, 1.0 / 6.0));
    return from_coefficients(1, std::move(c));
  }

  int dim() const { return d_; }

  Mat eval(double theta) const {
    if (fn_) return hermitize(fn_(theta));
    Mat out = Mat::Zero(d_, d_);
    for (const auto& [k, m] : coeffs_)
      out += m * std::exp(cplx(0.0, k * theta));
    return hermitize(out);
  }

  Mat coefficient(int k) const {
    const auto it = coeffs_.find(k);
    if (it != coeffs_.end()) return it->second;
    if (banded_) return Mat::Zero(d_, d_);
    Mat c;
    if (process_) {
      // Exact blocks of the stationary process symbol.
      const FermionProcessSpec& s = *process_;
      if (k == 0) {
        c = s.Q;
      } else {
        const Mat f = s.Q - s.B + s.X;
        Mat power = Mat::Identity(d_, d_);
        for (int j = 0; j < std::abs(k); ++j) power = s.A.adjoint() * power;
        c = (k > 0) ? Mat(power * f) : Mat((power * f).adjoint());
      }
    } else {
      c = Mat::Zero(d_, d_);
      for (int j = 0; j < quad_points_; ++j) {
        const double theta = -pi_const + 2.0 * pi_const * j / quad_points_;
        c += eval(theta) * std::exp(cplx(0.0, -k * theta));
      }
      c /= static_cast<double>(quad_points_);
    }
    coeffs_[k] = c;
    return c;
  }

  Mat block_toeplitz(int n) const {
    if (n < 1) throw shape_error("block_toeplitz: n must be >= 1");
    // Populate the cache serially before assembling.
    for (int k = -(n - 1); k <= n - 1; ++k) coefficient(k);
    Mat out(static_cast<long>(n) * d_, static_cast<long>(n) * d_);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        out.block(j * d_, k * d_, d_, d_) = coefficient(k - j);
    return hermitize(out);
  }

 private:
  int d_ = 1;
  std::function<Mat(double)> fn_;
  mutable std::map<int, Mat> coeffs_;
  bool banded_ = false;
  std::optional<FermionProcessSpec> process_;
  int quad_points_ = 1 << 12;
};

// Sorted (ascending) eigenvalues of the n-block compression.
inline RVec toeplitz_eigs(const ToeplitzSymbolFn& tfn, int n) {
  return hermitian_eigenvalues(tfn.block_toeplitz(n));
}

struct SzegoRow {
  int n = 0;
  double average = 0.0;    // (1/n) tr f(P_n That P_n)
  double increment = 0.0;  // tr f(P_{n+1} ...) - tr f(P_n ...)
  double target = 0.0;     // (1/2pi) Integral tr f(T(theta)) dtheta
};

// First Szegő limit data: averages and increments of tr f over growing
// compressions against the circle average of tr f(T(theta)).
inline std::vector<SzegoRow> szego_check(const ToeplitzSymbolFn& tfn,
                                         const std::function<double(double)>& f,
                                         const std::vector<int>& n_list) {
  auto tr_f = [&](int n) {
    const RVec eigs = toeplitz_eigs(tfn, n);
    double s = 0.0;
    for (Eigen::Index i = 0; i < eigs.size(); ++i) s += f(eigs(i));
    return s;
  };
  auto integrand = [&](double theta) {
    const RVec eigs = hermitian_eigenvalues(tfn.eval(theta));
    double s = 0.0;
    for (Eigen::Index i = 0; i < eigs.size(); ++i) s += f(eigs(i));
    return s;
  };
  double target = detail::periodic_average(integrand, 1 << 10);
  for (int k = 11; k <= 16; ++k) {
    const double next = detail::periodic_average(integrand, 1 << k);
    const bool done = std::abs(next - target) < 1e-10;
    target = next;
    if (done) break;
  }

  std::vector<SzegoRow> out;
  out.reserve(n_list.size());
  for (int n : n_list) {
    SzegoRow row;
    row.n = n;
    const double tn = tr_f(n);
    row.average = tn / n;
    row.increment = tr_f(n + 1) - tn;
    row.target = target;
    out.push_back(row);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Eigenvalue distribution against the level measure of the symbol.

// Sorted sample of all eigenvalues of T(theta) over a dense uniform grid;
// its empirical CDF approximates mu(]-inf, x]) = (1/2pi) |{theta : T(theta) <= x}|
// (eigenvalue-counting version in the block case).
inline RVec level_measure_samples(const ToeplitzSymbolFn& tfn,
                                  int grid = 1 << 17) {
  const int d = tfn.dim();
  std::vector<double> vals(static_cast<std::size_t>(grid) * d);
  parallel_for(grid, [&](int j) {
    const double theta = -pi_const + 2.0 * pi_const * j / grid;
    const RVec eigs = hermitian_eigenvalues(tfn.eval(theta));
    for (int i = 0; i < d; ++i)
      vals[static_cast<std::size_t>(j) * d + i] = eigs(i);
  });
  std::sort(vals.begin(), vals.end());
  RVec out(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = vals[i];
  return out;
}

// Kolmogorov distance between the empirical CDF of `points` and the CDF of
// the (sorted) reference sample.
inline double kolmogorov_distance(const RVec& points, const RVec& reference) {
  if (points.size() == 0 || reference.size() == 0)
    throw shape_error("kolmogorov_distance: empty input");
  std::vector<double> xs(points.data(), points.data() + points.size());
  std::sort(xs.begin(), xs.end());
  const double m = static_cast<double>(reference.size());
  const double n = static_cast<double>(xs.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double* lo = reference.data();
    const double* hi = reference.data() + reference.size();
    const double fref =
        static_cast<double>(std::upper_bound(lo, hi, xs[i]) - lo) / m;
    const double f_hi = static_cast<double>(i + 1) / n;
    const double f_lo = static_cast<double>(i) / n;
    worst = std::max(worst, std::max(std::abs(f_hi - fref), std::abs(fref - f_lo)));
  }
  return worst;
}

}  // namespace qproc
