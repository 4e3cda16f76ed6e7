#pragma once

// Shared aliases, error taxonomy, and default tolerances.
//
// Every numerical routine in the library takes its tolerances from here
// unless the caller overrides them explicitly; keeping the constants in one
// place makes the validation behaviour of the whole library auditable.

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace qproc {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline constexpr double pi_const = 3.14159265358979323846264338327950288;

// Default tolerances.
inline constexpr double tol_herm = 1e-12;  // hermiticity residual (max entry)
inline constexpr double tol_psd = 1e-10;   // allowed eigenvalue negativity
inline constexpr double tol_prob = 1e-12;  // probability sums and entries
inline constexpr double eig_clip = 1e-10;  // eigenvalues in [-eig_clip, 0) are
                                           // clipped to 0 before logarithms;
                                           // anything below is an error

// Error taxonomy.  All library exceptions derive from qproc::error so that a
// caller can catch everything from this library in one handler while still
// being able to distinguish the failure class.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dimension or structural mismatch between arguments.
struct shape_error : error {
  using error::error;
};

// A value lies outside its mathematical domain (negative probability,
// non-positive state, parameters outside a complete-positivity region, ...).
struct domain_error : error {
  using error::error;
};

// Two inputs that must agree (marginals, stationarity, map compatibility)
// do not.
struct compatibility_error : error {
  using error::error;
};

// A requested enumeration or truncation exceeds the supported size.
struct size_error : error {
  using error::error;
};

// An internal post-condition failed: the inputs passed their own validation
// but the computation could not deliver its promised guarantees.
struct contract_error : error {
  using error::error;
};

}  // namespace qproc
