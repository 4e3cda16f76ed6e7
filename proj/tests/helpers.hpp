#pragma once

// Shared fixtures for the unit tests and the acceptance harness: a CLI
// runner, random spec generators, and an unguarded construction of the
// SU(2)-covariant action (used to compare the closed-form CP region against
// direct Choi positivity without tripping the library's region guard).

#include "qproc/channels.hpp"
#include "qproc/classical.hpp"
#include "qproc/fcs_su2.hpp"
#include "qproc/rng.hpp"

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace testutil {

struct CommandResult {
  int exit_code = -1;
  std::string output;
};

// Runs a shell command, capturing stdout (append "2>&1" to also capture
// stderr).  The exit code is the child's wait status decoded by the shell.
inline CommandResult run_command(const std::string& cmd) {
  CommandResult result;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed for: " + cmd);
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0)
    result.output.append(buf.data(), got);
  const int status = ::pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

inline std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out += c;
  }
  out += "'";
  return out;
}

inline std::string cli_path() { return QPROC_CLI_PATH; }
inline std::string data_dir() { return QPROC_DATA_DIR; }

inline CommandResult run_cli(const std::string& args) {
  return run_command(shell_quote(cli_path()) + " " + args + " 2>/dev/null");
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

// Random row-stochastic matrix with strictly positive entries.
inline qproc::StochasticMatrix random_stochastic(qproc::Rng& rng, int d) {
  qproc::RMat t(d, d);
  for (int i = 0; i < d; ++i) {
    double sum = 0.0;
    for (int j = 0; j < d; ++j) {
      t(i, j) = 0.05 + rng.uniform();
      sum += t(i, j);
    }
    t.row(i) /= sum;
  }
  return qproc::StochasticMatrix(t);
}

inline qproc::RVec random_distribution(qproc::Rng& rng, int d) {
  qproc::RVec p(d);
  double sum = 0.0;
  for (int i = 0; i < d; ++i) {
    p(i) = 0.05 + rng.uniform();
    sum += p(i);
  }
  return p / sum;
}

// Random pair of two-site laws sharing the same middle marginal, suitable
// for a three-point extension: mu12(e1, e2) = P(e1 | e2) m(e2) and
// nu23(e2, e3) = m(e2) Q(e3 | e2).
inline std::pair<qproc::JointPmf, qproc::JointPmf> random_compatible_pair(
    qproc::Rng& rng, int d) {
  const qproc::RVec mid = random_distribution(rng, d);
  qproc::RVec left(static_cast<long>(d) * d), right(static_cast<long>(d) * d);
  for (int e2 = 0; e2 < d; ++e2) {
    const qproc::RVec p = random_distribution(rng, d);
    const qproc::RVec q = random_distribution(rng, d);
    for (int other = 0; other < d; ++other) {
      left(static_cast<long>(other) * d + e2) = p(other) * mid(e2);
      right(static_cast<long>(e2) * d + other) = mid(e2) * q(other);
    }
  }
  return {qproc::JointPmf(2, d, left), qproc::JointPmf(2, d, right)};
}

// Choi matrix of the SU(2)-covariant action for arbitrary parameters, built
// without any admissibility guard so that positivity can be compared against
// the closed-form region on both sides of the boundary.
inline qproc::Mat su2_action_choi_unguarded(const qproc::Su2Params& p) {
  using qproc::cplx;
  using qproc::Mat;
  std::array<Mat, 4> sigma{qproc::pauli(0), qproc::pauli(1), qproc::pauli(2),
                           qproc::pauli(3)};
  Mat choi = Mat::Zero(8, 8);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const Mat x = qproc::matrix_unit(4, i, j);
      cplx c[4][4];
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          c[a][b] = (qproc::kron(sigma[a], sigma[b]) * x).trace() / 4.0;
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
            if (int eps = qproc::levi_civita(a, b, cc))
              out += (p.eta / 2.0) * static_cast<double>(eps) * c[a][b] *
                     sigma[cc];
      choi.block(2 * i, 2 * j, 2, 2) = out;
    }
  return qproc::hermitize(choi);
}

}  // namespace testutil
