#pragma once

// Hidden Markov processes defined by nonnegative emission matrices E(e)
// whose sum is a stochastic matrix.  Word probabilities follow the
// row-vector convention <mu, E(e0)...E(en) 1>, block entropies come from
// exact enumeration, and the entropy rate is estimated by simulating the
// Blackwell filter.

#include "qproc/classical.hpp"
#include "qproc/parallel.hpp"
#include "qproc/rng.hpp"

#include <cstdio>
#include <functional>
#include <optional>

namespace qproc {

class HmmSpec {
 public:
  explicit HmmSpec(std::vector<RMat> emissions,
                   std::optional<ProbVector> mu = std::nullopt)
      : e_(std::move(emissions)) {
    if (e_.empty()) throw shape_error("HmmSpec: no emission matrices");
    const long d = e_[0].rows();
    RMat sum = RMat::Zero(d, d);
    for (std::size_t k = 0; k < e_.size(); ++k) {
      if (e_[k].rows() != d || e_[k].cols() != d)
        throw shape_error("HmmSpec: emission matrices must be square with equal dims");
      for (long i = 0; i < d; ++i)
        for (long j = 0; j < d; ++j) {
          if (e_[k](i, j) < -tol_prob) {
            std::ostringstream os;
            os << "HmmSpec: negative entry " << e_[k](i, j) << " in E(" << k
               << ")";
            throw domain_error(os.str());
          }
          if (e_[k](i, j) < 0.0) e_[k](i, j) = 0.0;
        }
      sum += e_[k];
    }
    chain_.emplace(StochasticMatrix(sum));
    if (mu) {
      check_stationarity(*chain_, *mu);
      mu_.emplace(std::move(*mu));
    } else {
      mu_.emplace(invariant_measure(*chain_));
    }
  }

  int d_hidden() const { return static_cast<int>(e_[0].rows()); }
  int d_obs() const { return static_cast<int>(e_.size()); }
  const RMat& emission(int symbol) const {
    if (symbol < 0 || symbol >= d_obs())
      throw shape_error("HmmSpec: symbol out of range");
    return e_[symbol];
  }
  const StochasticMatrix& chain() const { return *chain_; }
  const ProbVector& mu() const { return *mu_; }

 private:
  std::vector<RMat> e_;
  std::optional<StochasticMatrix> chain_;
  std::optional<ProbVector> mu_;
};

// Stochastic d x d^2 extension with S(phi, (eta, eps)) = delta(eta, eps) *
// T(phi, eps): the hidden state reveals itself.  Pair (eta, eps) is flattened
// as eta*d + eps.
inline RMat markov_embedding(const StochasticMatrix& T) {
  const int d = T.dim();
  RMat s = RMat::Zero(d, static_cast<long>(d) * d);
  for (int phi = 0; phi < d; ++phi)
    for (int eps = 0; eps < d; ++eps)
      s(phi, static_cast<long>(eps) * d + eps) = T.matrix()(phi, eps);
  return s;
}

// Builds an HMM from a stochastic d x d^2 matrix S subject to the
// compatibility condition: both partial sums of S over the pair index must
// coincide (they then equal the transition matrix T).
inline HmmSpec hmm_from_extension(const RMat& s) {
  const long d = s.rows();
  if (d < 1 || s.cols() != d * d)
    throw shape_error("hmm_from_extension: S must be d x d^2");
  for (long i = 0; i < d; ++i) {
    double row = 0.0;
    for (long j = 0; j < d * d; ++j) {
      if (s(i, j) < -tol_prob) {
        std::ostringstream os;
        os << "hmm_from_extension: negative entry " << s(i, j);
        throw domain_error(os.str());
      }
      row += std::max(s(i, j), 0.0);
    }
    if (std::abs(row - 1.0) > tol_prob) {
      std::ostringstream os;
      os << "hmm_from_extension: row " << i << " of S sums to " << row;
      throw domain_error(os.str());
    }
  }
  double max_dev = 0.0;
  for (long phi = 0; phi < d; ++phi)
    for (long eps = 0; eps < d; ++eps) {
      double first = 0.0, second = 0.0;
      for (long other = 0; other < d; ++other) {
        first += s(phi, eps * d + other);   // sum over the second pair slot
        second += s(phi, other * d + eps);  // sum over the first pair slot
      }
      max_dev = std::max(max_dev, std::abs(first - second));
    }
  if (max_dev > 1e-12) {
    std::ostringstream os;
    os << "hmm_from_extension: partial sums of S disagree (max deviation "
       << max_dev << ")";
    throw compatibility_error(os.str());
  }
  std::vector<RMat> e(d, RMat::Zero(d, d));
  for (long eps = 0; eps < d; ++eps)
    for (long phi = 0; phi < d; ++phi)
      for (long eta = 0; eta < d; ++eta) e[eps](phi, eta) = s(phi, eta * d + eps);
  return HmmSpec(std::move(e));
}

// omega(word) = <mu, E(e0) ... E(en) 1>; the empty word has probability 1.
inline double hmm_word_probability(const HmmSpec& spec,
                                   const std::vector<int>& word) {
  RVec p = spec.mu().values();
  for (int symbol : word) {
    if (symbol < 0 || symbol >= spec.d_obs())
      throw shape_error("hmm_word_probability: symbol out of range");
    p = spec.emission(symbol).transpose() * p;  // row vector from the left
  }
  return p.sum();
}

// Shannon entropies of the word laws for every length 0..max_len, by one
// depth-first enumeration (each prefix is visited exactly once and its
// probability is the sum over continuations).
inline std::vector<double> hmm_level_entropies(const HmmSpec& spec,
                                               int max_len) {
  if (max_len < 0) throw shape_error("hmm_level_entropies: negative length");
  double count = 1.0;
  for (int k = 0; k < max_len; ++k) {
    count *= spec.d_obs();
    if (count > static_cast<double>(1 << 24))
      throw size_error("hmm_level_entropies: enumeration exceeds 2^24 words");
  }
  std::vector<double> h(max_len + 1, 0.0);
  std::function<void(const RVec&, int)> walk = [&](const RVec& p, int depth) {
    if (depth > 0) h[depth] -= xlogx(p.sum());
    if (depth == max_len) return;
    for (int symbol = 0; symbol < spec.d_obs(); ++symbol)
      walk(spec.emission(symbol).transpose() * p, depth + 1);
  };
  walk(spec.mu().values(), 0);
  return h;
}

// H_n - H_{n-1}, where H_n is the entropy of words of length n+1.
inline double hmm_entropy_increment(const HmmSpec& spec, int n) {
  if (n < 0) throw shape_error("hmm_entropy_increment: n must be >= 0");
  const std::vector<double> h = hmm_level_entropies(spec, n + 1);
  return h[n + 1] - h[n];
}

struct BlackwellResult {
  double h = 0.0;
  double std_err = 0.0;
  long restarts = 0;
  long samples_used = 0;
};

// Simulates the Blackwell filter: p0 = mu; emit e with probability
// q(e) = <p E(e), 1>; update p <- p E(e)/q(e).  The entropy rate is the
// time-average of H(q(.)) after burn-in.  Sampling runs on a fixed number of
// independent substream chains (merged deterministically, so results do not
// depend on the thread budget), and the standard error comes from batch
// means, which stays honest under the filter's autocorrelation.
inline BlackwellResult blackwell_entropy(const HmmSpec& spec,
                                         long samples = 100000,
                                         long burn_in = 1000,
                                         std::uint64_t seed = 0) {
  if (samples < 1) throw shape_error("blackwell_entropy: samples must be >= 1");
  if (burn_in < 0) throw shape_error("blackwell_entropy: negative burn-in");
  const int chains = samples >= 8000 ? 8 : 1;
  const int batches_per_chain = samples >= 2000 ? 12 : 1;
  const long per_chain =
      ((samples + chains - 1) / chains + batches_per_chain - 1) /
      batches_per_chain * batches_per_chain;
  const long batch_len = per_chain / batches_per_chain;

  struct ChainOut {
    std::vector<double> batch_means;
    long restarts = 0;
    bool absorbing = false;
    bool complete = false;
  };
  std::vector<ChainOut> outs(chains);

  parallel_for(chains, [&](int c) {
    Rng rng = Rng(seed).stream("blackwell.chain." + std::to_string(c));
    ChainOut& out = outs[c];
    RVec p = spec.mu().values();
    RVec q(spec.d_obs());
    double batch_acc = 0.0;
    long recorded = 0;
    long burned = 0;
    const long step_cap = 10 * (burn_in + per_chain) + 1000;
    for (long step = 0; step < step_cap && recorded < per_chain; ++step) {
      double total = 0.0;
      for (int e = 0; e < spec.d_obs(); ++e) {
        q(e) = (spec.emission(e).transpose() * p).sum();
        total += q(e);
      }
      if (total < 1e-12) {
        out.absorbing = true;
        return;
      }
      double h_step = 0.0;
      for (int e = 0; e < spec.d_obs(); ++e) h_step -= xlogx(q(e) / total);

      const double u = rng.uniform() * total;
      int chosen = spec.d_obs() - 1;
      double cum = 0.0;
      for (int e = 0; e < spec.d_obs(); ++e) {
        cum += q(e);
        if (u < cum) {
          chosen = e;
          break;
        }
      }
      if (q(chosen) < 1e-14 * total) {
        // Numerically degenerate update: restart the trajectory instead of
        // propagating a near-0/0 filter state.
        p = spec.mu().values();
        ++out.restarts;
        continue;
      }
      p = (spec.emission(chosen).transpose() * p) / q(chosen);
      p /= p.sum();

      if (burned < burn_in) {
        ++burned;
        continue;
      }
      batch_acc += h_step;
      ++recorded;
      if (recorded % batch_len == 0) {
        out.batch_means.push_back(batch_acc / batch_len);
        batch_acc = 0.0;
      }
    }
    out.complete = (recorded == per_chain);
  });

  BlackwellResult result;
  std::vector<double> means;
  for (const ChainOut& out : outs) {
    if (out.absorbing || !out.complete)
      throw domain_error(
          "blackwell_entropy: filter reached an absorbing state (all "
          "emission probabilities vanished) or restarted too often to "
          "collect the requested samples");
    result.restarts += out.restarts;
    means.insert(means.end(), out.batch_means.begin(), out.batch_means.end());
  }
  result.samples_used = static_cast<long>(chains) * per_chain;
  double mean = 0.0;
  for (double m : means) mean += m;
  mean /= means.size();
  result.h = mean;
  if (means.size() > 1) {
    double var = 0.0;
    for (double m : means) var += (m - mean) * (m - mean);
    var /= (means.size() - 1);
    result.std_err = std::sqrt(var / means.size());
  }
  if (result.restarts > 0)
    std::fprintf(stderr, "blackwell_entropy: %ld trajectory restart(s)\n",
                 result.restarts);
  return result;
}

}  // namespace qproc
