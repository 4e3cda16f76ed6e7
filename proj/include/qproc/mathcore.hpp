#pragma once

// Validated linear-algebra primitives shared by every module: probability
// vectors, density matrices, entropies, partial trace/transpose, and a
// positive-semidefiniteness check with an explicit tolerance policy.
//
// Entropies are in nats throughout the library.

#include "qproc/common.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace qproc {

inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// H(p, 1-p) in nats; arguments outside [0, 1] within eig_clip are clipped.
inline double binary_entropy(double p) {
  if (p < 0.0 && p >= -eig_clip) p = 0.0;
  if (p > 1.0 && p <= 1.0 + eig_clip) p = 1.0;
  if (p < 0.0 || p > 1.0) {
    std::ostringstream os;
    os << "binary_entropy: argument " << p << " outside [0, 1]";
    throw domain_error(os.str());
  }
  return -xlogx(p) - xlogx(1.0 - p);
}

inline bool is_hermitian(const Mat& m, double tol = tol_herm) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

inline Mat hermitize(const Mat& m) { return 0.5 * (m + m.adjoint()); }

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline RMat kron(const RMat& a, const RMat& b) {
  RMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Mat matrix_unit(int d, int i, int j) {
  Mat e = Mat::Zero(d, d);
  e(i, j) = 1.0;
  return e;
}

// Pauli matrix sigma_a for a in {1, 2, 3}; a = 0 gives the identity.
inline Mat pauli(int a) {
  Mat s(2, 2);
  switch (a) {
    case 0:
      s << 1, 0, 0, 1;
      break;
    case 1:
      s << 0, 1, 1, 0;
      break;
    case 2:
      s << 0, cplx(0, -1), cplx(0, 1), 0;
      break;
    case 3:
      s << 1, 0, 0, -1;
      break;
    default:
      throw domain_error("pauli: index must be in {0, 1, 2, 3}");
  }
  return s;
}

// Eigenvalues of a hermitian matrix, ascending.
inline RVec hermitian_eigenvalues(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(m), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw contract_error("hermitian_eigenvalues: eigensolver failed");
  return es.eigenvalues();
}

struct PsdReport {
  bool psd = false;
  double min_eig = 0.0;
};

// Positive semidefiniteness by full spectral decomposition.  The matrix must
// be hermitian within tol_herm (relative to its largest entry); psd holds
// when the smallest eigenvalue is >= -tol.
inline PsdReport psd_check(const Mat& m, double tol = tol_psd) {
  if (m.rows() != m.cols()) throw shape_error("psd_check: matrix not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol_herm * scale)
    throw domain_error("psd_check: matrix is not hermitian");
  const RVec ev = hermitian_eigenvalues(m);
  return PsdReport{ev(0) >= -tol, ev(0)};
}

// Probability vector: entries >= -tol are clipped to zero, the sum must be
// 1 within tol, and the stored vector is renormalized exactly.
class ProbVector {
 public:
  explicit ProbVector(RVec p, double tol = tol_prob) {
    if (p.size() == 0) throw shape_error("ProbVector: empty vector");
    for (int i = 0; i < p.size(); ++i) {
      if (p(i) < -tol) {
        std::ostringstream os;
        os << "ProbVector: negative entry " << p(i) << " at index " << i;
        throw domain_error(os.str());
      }
      if (p(i) < 0.0) p(i) = 0.0;
    }
    const double sum = p.sum();
    if (std::abs(sum - 1.0) > tol) {
      std::ostringstream os;
      os << "ProbVector: entries sum to " << sum << ", expected 1";
      throw domain_error(os.str());
    }
    p_ = p / sum;
  }

  const RVec& values() const { return p_; }
  int size() const { return static_cast<int>(p_.size()); }
  double operator[](int i) const { return p_(i); }

 private:
  RVec p_;
};

inline double shannon_entropy(const ProbVector& p) {
  double h = 0.0;
  for (int i = 0; i < p.size(); ++i) h -= xlogx(p[i]);
  return h;
}

// Density matrix: hermitian within tol_herm, unit trace within tol_prob,
// eigenvalues >= -tol.  The stored matrix is the hermitized input.
class DensityMatrix {
 public:
  explicit DensityMatrix(const Mat& m, double tol = tol_psd) {
    if (m.rows() != m.cols()) throw shape_error("DensityMatrix: not square");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol_herm * scale)
      throw domain_error("DensityMatrix: not hermitian");
    if (std::abs(m.trace().real() - 1.0) > tol_prob ||
        std::abs(m.trace().imag()) > tol_prob) {
      std::ostringstream os;
      os << "DensityMatrix: trace " << m.trace() << ", expected 1";
      throw domain_error(os.str());
    }
    m_ = hermitize(m);
    const RVec ev = hermitian_eigenvalues(m_);
    if (ev(0) < -tol) {
      std::ostringstream os;
      os << "DensityMatrix: smallest eigenvalue " << ev(0) << " below -" << tol;
      throw domain_error(os.str());
    }
  }

  const Mat& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

 private:
  Mat m_;
};

// Eigenvalues of a hermitian matrix with the library's clipping policy:
// values in [-clip, 0) become 0, values below -clip are a domain error.
inline RVec clipped_spectrum(const Mat& hermitian, double clip = eig_clip) {
  RVec ev = hermitian_eigenvalues(hermitian);
  for (int i = 0; i < ev.size(); ++i) {
    if (ev(i) < -clip) {
      std::ostringstream os;
      os << "clipped_spectrum: eigenvalue " << ev(i) << " below -" << clip;
      throw domain_error(os.str());
    }
    if (ev(i) < 0.0) ev(i) = 0.0;
  }
  return ev;
}

inline double von_neumann_entropy(const DensityMatrix& rho) {
  const RVec ev = clipped_spectrum(rho.matrix());
  double h = 0.0;
  for (int i = 0; i < ev.size(); ++i) h -= xlogx(ev(i));
  return h;
}

// Partial trace over the complement of `keep` for an operator on a tensor
// product with factor dimensions `dims` (index 0 is the leftmost factor;
// flattening is row-major).  `keep` must be strictly increasing.
inline Mat partial_trace_raw(const Mat& m, const std::vector<int>& dims,
                             const std::vector<int>& keep) {
  if (dims.empty()) throw shape_error("partial_trace: empty dimension list");
  long total = 1;
  for (int d : dims) {
    if (d < 1) throw shape_error("partial_trace: factor dimension < 1");
    total *= d;
  }
  if (m.rows() != total || m.cols() != total)
    throw shape_error("partial_trace: matrix size does not match dimensions");
  const int nf = static_cast<int>(dims.size());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    if (keep[k] < 0 || keep[k] >= nf)
      throw shape_error("partial_trace: keep index out of range");
    if (k > 0 && keep[k] <= keep[k - 1])
      throw shape_error("partial_trace: keep indices must be strictly increasing");
  }

  std::vector<long> stride(nf, 1);
  for (int f = nf - 2; f >= 0; --f) stride[f] = stride[f + 1] * dims[f + 1];

  std::vector<int> traced;
  for (int f = 0; f < nf; ++f)
    if (std::find(keep.begin(), keep.end(), f) == keep.end()) traced.push_back(f);

  auto offsets = [&](const std::vector<int>& factors) {
    std::vector<long> out{0};
    for (int f : factors) {
      std::vector<long> next;
      next.reserve(out.size() * dims[f]);
      for (long base : out)
        for (int v = 0; v < dims[f]; ++v) next.push_back(base + v * stride[f]);
      out = std::move(next);
    }
    return out;
  };
  const std::vector<long> kept_off = offsets(keep);
  const std::vector<long> traced_off = offsets(traced);

  const long dk = static_cast<long>(kept_off.size());
  Mat out = Mat::Zero(dk, dk);
  for (long a = 0; a < dk; ++a)
    for (long b = 0; b < dk; ++b) {
      cplx s = 0.0;
      for (long t : traced_off) s += m(kept_off[a] + t, kept_off[b] + t);
      out(a, b) = s;
    }
  return out;
}

inline DensityMatrix partial_trace(const DensityMatrix& rho,
                                   const std::vector<int>& dims,
                                   const std::vector<int>& keep) {
  return DensityMatrix(partial_trace_raw(rho.matrix(), dims, keep));
}

// Transpose of one factor of a bipartite operator on C^{d1} (x) C^{d2}.
inline Mat partial_transpose(const Mat& m, int d1, int d2, int which) {
  if (m.rows() != static_cast<long>(d1) * d2 || m.cols() != m.rows())
    throw shape_error("partial_transpose: matrix size does not match d1*d2");
  if (which != 0 && which != 1)
    throw shape_error("partial_transpose: factor index must be 0 or 1");
  Mat out(m.rows(), m.cols());
  for (int i = 0; i < d1; ++i)
    for (int j = 0; j < d2; ++j)
      for (int k = 0; k < d1; ++k)
        for (int l = 0; l < d2; ++l) {
          const long r = static_cast<long>(i) * d2 + j;
          const long c = static_cast<long>(k) * d2 + l;
          const long rr = which == 0 ? static_cast<long>(k) * d2 + j
                                     : static_cast<long>(i) * d2 + l;
          const long cc = which == 0 ? static_cast<long>(i) * d2 + l
                                     : static_cast<long>(k) * d2 + j;
          out(rr, cc) = m(r, c);
        }
  return out;
}

}  // namespace qproc
