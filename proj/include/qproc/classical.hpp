#pragma once

// Classical Markov chains over a finite alphabet: stochastic matrices,
// dense joint laws, three-point extensions, entropy rates, and the strong
// sub-additivity residual.

#include "qproc/mathcore.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace qproc {

class StochasticMatrix {
 public:
  explicit StochasticMatrix(RMat t, double tol = tol_prob) {
    if (t.rows() == 0 || t.rows() != t.cols())
      throw shape_error("StochasticMatrix: must be square and non-empty");
    for (int i = 0; i < t.rows(); ++i) {
      for (int j = 0; j < t.cols(); ++j) {
        if (t(i, j) < -tol) {
          std::ostringstream os;
          os << "StochasticMatrix: negative entry " << t(i, j) << " at (" << i
             << ", " << j << ")";
          throw domain_error(os.str());
        }
        if (t(i, j) < 0.0) t(i, j) = 0.0;
      }
      const double s = t.row(i).sum();
      if (std::abs(s - 1.0) > tol) {
        std::ostringstream os;
        os << "StochasticMatrix: row " << i << " sums to " << s;
        throw domain_error(os.str());
      }
      t.row(i) /= s;
    }
    t_ = std::move(t);
  }

  int dim() const { return static_cast<int>(t_.rows()); }
  const RMat& matrix() const { return t_; }
  ProbVector row(int i) const { return ProbVector(t_.row(i).transpose()); }

 private:
  RMat t_;
};

// Ergodicity (irreducible + aperiodic) via strict positivity of T^(d^2),
// evaluated in the boolean semiring so that legitimately tiny transition
// products cannot underflow to a false negative.
inline bool is_ergodic(const StochasticMatrix& T) {
  const int d = T.dim();
  if (d > 64) throw size_error("is_ergodic: alphabet larger than 64");
  std::vector<std::uint64_t> adj(d, 0), cur(d, 0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (T.matrix()(i, j) > 0.0) adj[i] |= (1ull << j);
  cur = adj;
  for (int step = 1; step < d * d; ++step) {
    std::vector<std::uint64_t> next(d, 0);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        if (cur[i] & (1ull << j)) next[i] |= adj[j];
    cur = std::move(next);
  }
  const std::uint64_t full = (d == 64) ? ~0ull : ((1ull << d) - 1);
  for (int i = 0; i < d; ++i)
    if (cur[i] != full) return false;
  return true;
}

// Stationary distribution mu with mu T = mu.  Primary solver: eigenvector of
// T^t for the eigenvalue nearest 1; fallback: Cesaro-averaged power
// iteration (handles defective or periodic cases under the flag).
inline ProbVector invariant_measure(const StochasticMatrix& T,
                                    bool allow_degenerate = false) {
  const int d = T.dim();
  if (!allow_degenerate && !is_ergodic(T))
    throw domain_error(
        "invariant_measure: chain is not ergodic (T^(d^2) has zero entries), "
        "so the invariant measure may be ambiguous; pass allow_degenerate to "
        "accept an arbitrary one");

  auto residual = [&](const RVec& mu) {
    return ((T.matrix().transpose() * mu) - mu).cwiseAbs().sum();
  };
  auto finish = [&](RVec mu) -> std::optional<ProbVector> {
    for (int i = 0; i < d; ++i) {
      if (mu(i) < -1e-12) return std::nullopt;
      if (mu(i) < 0.0) mu(i) = 0.0;
    }
    const double s = mu.sum();
    if (s <= 0.0) return std::nullopt;
    mu /= s;
    if (residual(mu) >= 1e-12) return std::nullopt;
    return ProbVector(mu);
  };

  Eigen::EigenSolver<RMat> es(T.matrix().transpose());
  if (es.info() == Eigen::Success) {
    int best = 0;
    for (int k = 1; k < d; ++k)
      if (std::abs(es.eigenvalues()(k) - 1.0) <
          std::abs(es.eigenvalues()(best) - 1.0))
        best = k;
    CVec v = es.eigenvectors().col(best);
    int lead = 0;
    for (int k = 1; k < d; ++k)
      if (std::abs(v(k)) > std::abs(v(lead))) lead = k;
    if (std::abs(v(lead)) > 0.0) v *= std::conj(v(lead)) / std::abs(v(lead));
    if (auto mu = finish(v.real())) return *mu;
  }

  RVec mu = RVec::Constant(d, 1.0 / d);
  RVec acc = RVec::Zero(d);
  for (int k = 1; k <= 400000; ++k) {
    mu = T.matrix().transpose() * mu;
    acc += mu;
    if (k % 64 == 0) {
      RVec avg = acc / k;
      avg /= avg.sum();
      if (residual(avg) < 1e-13)
        if (auto out = finish(avg)) return *out;
    }
  }
  throw contract_error("invariant_measure: power iteration did not converge");
}

// Dense joint law over words of fixed length.  Site 0 is the leftmost
// (most significant) digit of the flat index.
class JointPmf {
 public:
  JointPmf(int arity, int alphabet, RVec values, double mass_tol = 1e-10) {
    if (arity < 1 || alphabet < 1)
      throw shape_error("JointPmf: arity and alphabet must be >= 1");
    long size = 1;
    for (int k = 0; k < arity; ++k) {
      size *= alphabet;
      if (size > 4096)
        throw size_error("JointPmf: alphabet^arity exceeds 4096 entries");
    }
    if (values.size() != size)
      throw shape_error("JointPmf: value array size does not match alphabet^arity");
    for (int i = 0; i < values.size(); ++i) {
      if (values(i) < -tol_prob) {
        std::ostringstream os;
        os << "JointPmf: negative probability " << values(i) << " at index " << i;
        throw domain_error(os.str());
      }
      if (values(i) < 0.0) values(i) = 0.0;
    }
    const double mass = values.sum();
    if (std::abs(mass - 1.0) > mass_tol) {
      std::ostringstream os;
      os << "JointPmf: total mass " << mass << ", expected 1";
      throw domain_error(os.str());
    }
    arity_ = arity;
    d_ = alphabet;
    v_ = values / mass;
  }

  int arity() const { return arity_; }
  int alphabet() const { return d_; }
  const RVec& values() const { return v_; }

  long index(const std::vector<int>& word) const {
    if (static_cast<int>(word.size()) != arity_)
      throw shape_error("JointPmf: word length does not match arity");
    long idx = 0;
    for (int s : word) {
      if (s < 0 || s >= d_) throw shape_error("JointPmf: symbol out of range");
      idx = idx * d_ + s;
    }
    return idx;
  }

  double prob(const std::vector<int>& word) const { return v_(index(word)); }

  // Marginal onto the (strictly increasing) site list `keep`.
  JointPmf marginal(const std::vector<int>& keep) const {
    if (keep.empty()) throw shape_error("JointPmf: empty marginal site list");
    for (std::size_t k = 0; k < keep.size(); ++k) {
      if (keep[k] < 0 || keep[k] >= arity_)
        throw shape_error("JointPmf: marginal site out of range");
      if (k > 0 && keep[k] <= keep[k - 1])
        throw shape_error("JointPmf: marginal sites must be strictly increasing");
    }
    const int m = static_cast<int>(keep.size());
    long out_size = 1;
    for (int k = 0; k < m; ++k) out_size *= d_;
    RVec out = RVec::Zero(out_size);
    std::vector<int> word(arity_, 0);
    for (long idx = 0; idx < v_.size(); ++idx) {
      long rem = idx;
      for (int f = arity_ - 1; f >= 0; --f) {
        word[f] = static_cast<int>(rem % d_);
        rem /= d_;
      }
      long o = 0;
      for (int f : keep) o = o * d_ + word[f];
      out(o) += v_(idx);
    }
    return JointPmf(m, d_, out);
  }

  double entropy() const {
    double h = 0.0;
    for (int i = 0; i < v_.size(); ++i) h -= xlogx(v_(i));
    return h;
  }

 private:
  int arity_ = 0;
  int d_ = 0;
  RVec v_;
};

// Three-point law with prescribed pair marginals on (1,2) and (2,3):
// xi(e1,e2,e3) = mu12(e1,e2) nu23(e2,e3) / mu2(e2), with 0/0 := 0.
inline JointPmf markov_extension(const JointPmf& mu12, const JointPmf& nu23) {
  if (mu12.arity() != 2 || nu23.arity() != 2)
    throw shape_error("markov_extension: both inputs must have arity 2");
  if (mu12.alphabet() != nu23.alphabet())
    throw shape_error("markov_extension: alphabet sizes differ");
  const int d = mu12.alphabet();
  const RVec m2 = mu12.marginal({1}).values();
  const RVec n2 = nu23.marginal({0}).values();
  const double gap = (m2 - n2).cwiseAbs().maxCoeff();
  if (gap > 1e-12) {
    std::ostringstream os;
    os << "markov_extension: middle marginals disagree by " << gap;
    throw compatibility_error(os.str());
  }
  RVec xi = RVec::Zero(static_cast<long>(d) * d * d);
  for (int e1 = 0; e1 < d; ++e1)
    for (int e2 = 0; e2 < d; ++e2) {
      if (m2(e2) <= 0.0) continue;
      const double left = mu12.values()((long)e1 * d + e2) / m2(e2);
      for (int e3 = 0; e3 < d; ++e3)
        xi(((long)e1 * d + e2) * d + e3) = left * nu23.values()((long)e2 * d + e3);
    }
  return JointPmf(3, d, xi);
}

inline void check_stationarity(const StochasticMatrix& T, const ProbVector& mu,
                               double tol = 1e-9) {
  if (mu.size() != T.dim())
    throw shape_error("stationarity check: measure size does not match chain");
  const double res =
      ((T.matrix().transpose() * mu.values()) - mu.values()).cwiseAbs().sum();
  if (res > tol) {
    std::ostringstream os;
    os << "stationarity: measure is not invariant under T (residual " << res
       << ")";
    throw domain_error(os.str());
  }
}

// Joint law of n+1 consecutive symbols of the stationary chain:
// omega(e0,...,en) = mu(e0) T(e0,e1) ... T(e(n-1),en).
inline JointPmf markov_joint(const StochasticMatrix& T, const ProbVector& mu,
                             int n) {
  if (n < 0) throw shape_error("markov_joint: n must be >= 0");
  check_stationarity(T, mu);
  const int d = T.dim();
  const int arity = n + 1;
  long size = 1;
  for (int k = 0; k < arity; ++k) {
    size *= d;
    if (size > 4096)
      throw size_error("markov_joint: alphabet^(n+1) exceeds 4096 entries");
  }
  RVec v(size);
  std::vector<int> word(arity, 0);
  for (long idx = 0; idx < size; ++idx) {
    long rem = idx;
    for (int f = arity - 1; f >= 0; --f) {
      word[f] = static_cast<int>(rem % d);
      rem /= d;
    }
    double p = mu[word[0]];
    for (int f = 0; f + 1 < arity; ++f) p *= T.matrix()(word[f], word[f + 1]);
    v(idx) = p;
  }
  return JointPmf(arity, d, v);
}

struct EntropyRate {
  double h = 0.0;      // mean row entropy weighted by the invariant measure
  double h_min = 0.0;  // smallest row entropy
};

inline EntropyRate entropy_rate_classical(const StochasticMatrix& T,
                                          const ProbVector& mu) {
  check_stationarity(T, mu);
  EntropyRate out;
  out.h_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i < T.dim(); ++i) {
    double hi = 0.0;
    for (int j = 0; j < T.dim(); ++j) hi -= xlogx(T.matrix()(i, j));
    out.h += mu[i] * hi;
    out.h_min = std::min(out.h_min, hi);
  }
  return out;
}

inline EntropyRate entropy_rate_classical(const StochasticMatrix& T) {
  return entropy_rate_classical(T, invariant_measure(T));
}

// Strong sub-additivity residual H(12) + H(23) - H(123) - H(2); it is
// non-negative for every valid triple law and zero exactly for three-point
// extensions of compatible pair marginals.
inline double ssa_residual(const JointPmf& xi) {
  if (xi.arity() != 3) throw shape_error("ssa_residual: arity must be 3");
  return xi.marginal({0, 1}).entropy() + xi.marginal({1, 2}).entropy() -
         xi.entropy() - xi.marginal({1}).entropy();
}

}  // namespace qproc
