#pragma once

// JSON schema shared by the library's spec files and the CLI.
//
// Complex matrices serialize as nested arrays of [re, im] pairs; real
// matrices and probability vectors as plain nested number arrays.  Readers
// are forgiving in one direction only: a plain number is accepted where a
// complex entry is expected (imaginary part zero).  Structural problems in
// well-formed JSON raise qproc::domain_error with a path-like description;
// malformed JSON raises nlohmann's parse_error upstream.

#include "qproc/channels.hpp"
#include "qproc/classical.hpp"
#include "qproc/fermion.hpp"
#include "qproc/hmm.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace qproc {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Scalars and matrices.

inline cplx cplx_from_json(const json& j, const std::string& where) {
  if (j.is_number()) return cplx(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return cplx(j[0].get<double>(), j[1].get<double>());
  throw domain_error(where + ": expected a number or an [re, im] pair");
}

inline json cplx_to_json(const cplx& z) {
  return json::array({z.real(), z.imag()});
}

inline Mat mat_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty())
    throw domain_error(where + ": expected a non-empty array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw domain_error(where + ": rows must be non-empty arrays");
  Mat out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw domain_error(where + ": ragged rows");
    for (std::size_t c = 0; c < cols; ++c)
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          cplx_from_json(j[r][c], where + "[" + std::to_string(r) + "][" +
                                      std::to_string(c) + "]");
  }
  return out;
}

inline json mat_to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(cplx_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline RMat rmat_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty())
    throw domain_error(where + ": expected a non-empty array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw domain_error(where + ": rows must be non-empty arrays");
  RMat out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw domain_error(where + ": ragged rows");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number())
        throw domain_error(where + "[" + std::to_string(r) + "][" +
                           std::to_string(c) + "]: expected a real number");
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          j[r][c].get<double>();
    }
  }
  return out;
}

inline json rmat_to_json(const RMat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline RVec rvec_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty())
    throw domain_error(where + ": expected a non-empty array of numbers");
  RVec out(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number())
      throw domain_error(where + "[" + std::to_string(i) + "]: expected a number");
    out(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return out;
}

inline json rvec_to_json(const RVec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

// ---------------------------------------------------------------------------
// Spec files.

namespace detail {

inline void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                                const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw domain_error(where + ": unknown key \"" + it.key() + "\"");
}

}  // namespace detail

enum class SpecKind { markov, hmm, davies, fermion };

inline SpecKind detect_spec_kind(const json& j) {
  if (!j.is_object()) throw domain_error("spec: expected a JSON object");
  if (j.contains("A")) return SpecKind::fermion;
  if (j.contains("E")) return SpecKind::hmm;
  if (j.contains("D")) return SpecKind::davies;
  if (j.contains("T")) return SpecKind::markov;
  throw domain_error("spec: none of the keys A/E/D/T present, cannot identify the spec kind");
}

struct MarkovSpecFile {
  RMat T;
  std::optional<RVec> mu;
};

inline MarkovSpecFile markov_spec_from_json(const json& j) {
  detail::reject_unknown_keys(j, {"T", "mu"}, "markov spec");
  if (!j.contains("T")) throw domain_error("markov spec: missing key \"T\"");
  MarkovSpecFile out;
  out.T = rmat_from_json(j["T"], "T");
  if (j.contains("mu")) out.mu = rvec_from_json(j["mu"], "mu");
  return out;
}

inline json markov_spec_to_json(const MarkovSpecFile& s) {
  json out;
  out["T"] = rmat_to_json(s.T);
  if (s.mu) out["mu"] = rvec_to_json(*s.mu);
  return out;
}

struct HmmSpecFile {
  std::vector<RMat> E;  // indexed by symbol
  std::uint64_t seed = 0;
};

inline HmmSpecFile hmm_spec_from_json(const json& j) {
  detail::reject_unknown_keys(j, {"E", "seed"}, "hmm spec");
  if (!j.contains("E") || !j["E"].is_object())
    throw domain_error("hmm spec: missing object key \"E\"");
  HmmSpecFile out;
  const json& e = j["E"];
  out.E.resize(e.size());
  std::vector<bool> seen(e.size(), false);
  for (auto it = e.begin(); it != e.end(); ++it) {
    std::size_t idx = 0;
    try {
      idx = std::stoul(it.key());
    } catch (const std::exception&) {
      throw domain_error("hmm spec: E keys must be symbol indices, got \"" + it.key() + "\"");
    }
    if (idx >= out.E.size() || seen[idx])
      throw domain_error("hmm spec: E keys must be 0.." +
                         std::to_string(out.E.size() - 1) + " exactly once");
    seen[idx] = true;
    out.E[idx] = rmat_from_json(it.value(), "E[\"" + it.key() + "\"]");
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
      throw domain_error("hmm spec: seed must be an integer");
    out.seed = j["seed"].get<std::uint64_t>();
  }
  return out;
}

inline json hmm_spec_to_json(const HmmSpecFile& s) {
  json e = json::object();
  for (std::size_t k = 0; k < s.E.size(); ++k)
    e[std::to_string(k)] = rmat_to_json(s.E[k]);
  json out;
  out["E"] = std::move(e);
  out["seed"] = s.seed;
  return out;
}

struct DaviesSpecFile {
  RMat T;
  RMat D;
  std::optional<RVec> mu;
};

inline DaviesSpecFile davies_spec_from_json(const json& j) {
  detail::reject_unknown_keys(j, {"T", "D", "mu"}, "davies spec");
  if (!j.contains("T")) throw domain_error("davies spec: missing key \"T\"");
  if (!j.contains("D")) throw domain_error("davies spec: missing key \"D\"");
  DaviesSpecFile out;
  out.T = rmat_from_json(j["T"], "T");
  out.D = rmat_from_json(j["D"], "D");
  if (j.contains("mu")) out.mu = rvec_from_json(j["mu"], "mu");
  return out;
}

inline json davies_spec_to_json(const DaviesSpecFile& s) {
  json out;
  out["T"] = rmat_to_json(s.T);
  out["D"] = rmat_to_json(s.D);
  if (s.mu) out["mu"] = rvec_to_json(*s.mu);
  return out;
}

struct FermionSpecFile {
  Mat A;
  Mat B;
  Mat X;  // defaults to zero when absent
};

inline FermionSpecFile fermion_spec_from_json(const json& j) {
  detail::reject_unknown_keys(j, {"A", "B", "X"}, "fermion spec");
  if (!j.contains("A")) throw domain_error("fermion spec: missing key \"A\"");
  if (!j.contains("B")) throw domain_error("fermion spec: missing key \"B\"");
  FermionSpecFile out;
  out.A = mat_from_json(j["A"], "A");
  out.B = mat_from_json(j["B"], "B");
  out.X = j.contains("X") ? mat_from_json(j["X"], "X")
                          : Mat(Mat::Zero(out.A.rows(), out.A.cols()));
  return out;
}

inline json fermion_spec_to_json(const FermionSpecFile& s) {
  json out;
  out["A"] = mat_to_json(s.A);
  out["B"] = mat_to_json(s.B);
  out["X"] = mat_to_json(s.X);
  return out;
}

}  // namespace qproc
