#pragma once

// Deterministic random number generation.
//
// Every stochastic routine in the library draws from an Rng seeded by the
// caller, and derives independent named substreams for its internal pieces.
// Substreams make results reproducible under refactoring: inserting a new
// consumer does not shift the draws seen by existing ones, because each
// substream is keyed by (seed, label) rather than by draw order.

#include "qproc/common.hpp"

#include <cstdint>
#include <string_view>

namespace qproc {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(mix_(seed ^ 0x9e3779b97f4a7c15ull)) {}

  // Independent generator derived from this one's seed and a label.
  Rng stream(std::string_view label) const {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a over the label
    for (char c : label) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
    return Rng(state_ ^ mix_(h));
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix_(state_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // Uniform on {0, ..., n-1}.  Modulo bias is ~n / 2^64, far below any
  // tolerance used in this library.
  int uniform_int(int n) {
    return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n));
  }

  // Standard normal via Box-Muller (second value cached).
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = 0.0;
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(t);
    have_cached_ = true;
    return r * std::cos(t);
  }

  cplx normal_cplx() {
    const double re = normal();
    const double im = normal();
    return cplx(re, im) / std::sqrt(2.0);
  }

  Mat ginibre(int rows, int cols) {
    Mat g(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) g(i, j) = normal_cplx();
    return g;
  }

  // Haar-distributed unitary: QR of a Ginibre matrix with the phases of the
  // R diagonal absorbed into Q.
  Mat haar_unitary(int d) {
    const Mat g = ginibre(d, d);
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ();
    const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < d; ++j) {
      const cplx rj = r(j, j);
      const double a = std::abs(rj);
      q.col(j) *= (a > 0.0) ? rj / a : cplx(1.0, 0.0);
    }
    return q;
  }

  // Random point on the unit sphere in R^3.
  void unit_vector3(double out[3]) {
    double n2 = 0.0;
    do {
      n2 = 0.0;
      for (int i = 0; i < 3; ++i) {
        out[i] = normal();
        n2 += out[i] * out[i];
      }
    } while (n2 < 1e-24);
    const double inv = 1.0 / std::sqrt(n2);
    for (int i = 0; i < 3; ++i) out[i] *= inv;
  }

 private:
  static std::uint64_t mix_(std::uint64_t z) {  // splitmix64 finalizer
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace qproc
