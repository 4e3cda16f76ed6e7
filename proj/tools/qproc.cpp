// qproc: command-line driver for the quantum-process numerics library.
//
// One subcommand per pipeline.  All randomness flows from --seed through
// named substreams, so identical invocations produce byte-identical output.
// Exit codes: 0 success, 1 validation/assertion failure, 2 usage or JSON
// parse error.

#include <CLI11.hpp>

#include "qproc/fcs_su2.hpp"
#include "qproc/json_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace qproc;

// Usage-level problems (unreadable files, bad paths): exit code 2.
struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw usage_error("cannot open input file: " + path);
  return json::parse(in);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw usage_error("cannot open output file: " + path);
  out << text;
}

void emit_json(const json& j, const std::string& output) {
  write_text(output, j.dump(2) + "\n");
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string error_kind(const qproc::error& e) {
  if (dynamic_cast<const shape_error*>(&e)) return "shape";
  if (dynamic_cast<const qproc::domain_error*>(&e)) return "domain";
  if (dynamic_cast<const compatibility_error*>(&e)) return "compatibility";
  if (dynamic_cast<const size_error*>(&e)) return "size";
  if (dynamic_cast<const contract_error*>(&e)) return "contract";
  return "error";
}

json region_check_json(const Su2RegionCheck& rc) {
  return json{{"family", rc.family},
              {"inside", rc.inside},
              {"linear_slack", rc.linear_slack},
              {"quadratic_slack", rc.quadratic_slack}};
}

std::string word_string(const std::vector<int>& word, int alphabet) {
  std::string s;
  for (std::size_t k = 0; k < word.size(); ++k) {
    if (alphabet > 10 && k > 0) s += '-';
    s += std::to_string(word[k]);
  }
  return s;
}

// ---------------------------------------------------------------------------
// markov

int cmd_markov(const std::string& input, const std::string& output, int n) {
  const MarkovSpecFile mf = markov_spec_from_json(read_json_file(input));
  const StochasticMatrix t(mf.T);
  ProbVector mu = mf.mu ? ProbVector(*mf.mu) : invariant_measure(t);
  if (mf.mu) check_stationarity(t, mu);
  const EntropyRate er = entropy_rate_classical(t, mu);

  json out;
  out["d"] = t.dim();
  out["ergodic"] = is_ergodic(t);
  out["mu"] = rvec_to_json(mu.values());
  out["entropy_rate"] = er.h;
  out["entropy_rate_min_row"] = er.h_min;

  if (n >= 0) {
    const JointPmf joint = markov_joint(t, mu, n);
    if (ends_with(output, ".csv")) {
      std::ostringstream csv;
      csv << "word,probability\n";
      std::vector<int> word(joint.arity(), 0);
      for (long idx = 0; idx < joint.values().size(); ++idx) {
        long rem = idx;
        for (int f = joint.arity() - 1; f >= 0; --f) {
          word[f] = static_cast<int>(rem % joint.alphabet());
          rem /= joint.alphabet();
        }
        csv << word_string(word, joint.alphabet()) << ','
            << fmt(joint.values()(idx)) << '\n';
      }
      write_text(output, csv.str());
      emit_json(out, "");
      return 0;
    }
    json words = json::array();
    std::vector<int> word(joint.arity(), 0);
    for (long idx = 0; idx < joint.values().size(); ++idx) {
      long rem = idx;
      for (int f = joint.arity() - 1; f >= 0; --f) {
        word[f] = static_cast<int>(rem % joint.alphabet());
        rem /= joint.alphabet();
      }
      words.push_back(json{{"word", word_string(word, joint.alphabet())},
                           {"p", joint.values()(idx)}});
    }
    out["words"] = std::move(words);
  }
  emit_json(out, output);
  return 0;
}

// ---------------------------------------------------------------------------
// hmm-entropy

int cmd_hmm_entropy(const std::string& input, const std::string& output,
                    long samples, int nmax, bool seed_given, std::uint64_t seed) {
  const HmmSpecFile hf = hmm_spec_from_json(read_json_file(input));
  const std::uint64_t use_seed = seed_given ? seed : hf.seed;
  const HmmSpec spec(hf.E);
  const BlackwellResult br = blackwell_entropy(spec, samples, 1000, use_seed);
  const std::vector<double> levels = hmm_level_entropies(spec, nmax + 1);

  json out;
  out["d_hidden"] = spec.d_hidden();
  out["d_obs"] = spec.d_obs();
  out["seed"] = use_seed;
  out["h"] = br.h;
  out["std_err"] = br.std_err;
  out["samples_used"] = br.samples_used;
  out["restarts"] = br.restarts;
  json inc = json::array();
  for (int k = 0; k + 1 < static_cast<int>(levels.size()); ++k)
    inc.push_back(levels[k + 1] - levels[k]);
  out["increments"] = std::move(inc);
  emit_json(out, output);
  return 0;
}

// ---------------------------------------------------------------------------
// davies-check

json davies_report_json(const DaviesReport& rep) {
  return json{{"detailed_balance_residual", rep.detailed_balance_residual},
              {"triangle_residual", rep.triangle_residual},
              {"cp", rep.cp},
              {"cp_matrix_min_eig", rep.cp_matrix_min_eig},
              {"choi_psd", rep.choi_psd},
              {"choi_min_eig", rep.choi_min_eig},
              {"cp_tests_agree", rep.cp_tests_agree},
              {"unital_residual", rep.unital_residual},
              {"trace_preserving_residual", rep.trace_preserving_residual},
              {"mu", rvec_to_json(rep.mu)}};
}

int cmd_davies_check(const std::string& input, const std::string& output) {
  const DaviesSpecFile df = davies_spec_from_json(read_json_file(input));
  const StochasticMatrix t(df.T);
  std::optional<ProbVector> mu;
  if (df.mu) mu = ProbVector(*df.mu);
  const DaviesReport rep = davies_validate(t, df.D, mu);
  emit_json(davies_report_json(rep), output);
  return 0;
}

// ---------------------------------------------------------------------------
// fcs-su2

int cmd_fcs_su2(const std::string& mode, double alpha, double mu,
                std::optional<double> nu, double eta, int family, int nmax,
                std::uint64_t seed, double tol, const std::string& output) {
  json out;
  if (mode == "werner") {
    out["mode"] = "werner";
    out["threshold"] = werner_ppt_threshold(tol);
    json curve = json::array();
    for (int k = 0; k <= 64; ++k) {
      const double lam = static_cast<double>(k) / 64.0;
      const WernerReport wr = werner_analysis(lam);
      curve.push_back(json{{"lambda", lam},
                           {"p_expectation", wr.p_expectation},
                           {"pt_min_eig", wr.pt_min_eig}});
    }
    out["curve"] = std::move(curve);
    emit_json(out, output);
    return 0;
  }

  if (mode == "eval") {
    const double nu_val = nu.value_or(mu);
    const int fam =
        family != 0 ? family : (std::abs(nu_val - mu) > 1e-15 ? 4 : 3);
    const Su2Params p(alpha, mu, nu_val, eta);
    const Su2RegionCheck rc = su2_region_check(p, fam);
    out["mode"] = "eval";
    out["params"] =
        json{{"alpha", alpha}, {"mu", mu}, {"nu", nu_val}, {"eta", eta}};
    out["region_check"] = region_check_json(rc);
    if (rc.inside) {
      const FcsSpec spec = su2_map_build(p, fam);
      out["compatible"] = spec.compatible();
      out["compat_residual"] = spec.compat_residual();
      if (spec.compatible()) {
        out["p_expectation"] = singlet_expectation(spec);
        out["closed_form"] = su2_singlet_closed_form(p);
        if (nmax >= 1) {
          const EntropySequence es = fcs_entropy_sequence(spec, nmax);
          out["entropies"] = es.H;
          out["entropy_increments"] = es.increments;
        }
      }
    }
    emit_json(out, output);
    return 0;
  }

  const SingletOptimum opt = optimize_singlet(mode, seed);
  out["mode"] = opt.mode;
  out["value"] = opt.value;
  json arg = json::object();
  for (const auto& [k, v] : opt.argmax) arg[k] = v;
  if (mode == "su2_stationary") {
    const Su2Params p(arg["alpha"].get<double>(), arg["mu"].get<double>(),
                      arg["eta"].get<double>());
    out["region_check"] = region_check_json(su2_region_check(p, 3));
  } else if (mode == "period2") {
    const Su2Params p1(arg["alpha1"].get<double>(), arg["mu1"].get<double>(),
                       arg["nu1"].get<double>(), arg["eta1"].get<double>());
    const Su2Params p2(arg["alpha2"].get<double>(), arg["mu2"].get<double>(),
                       arg["nu2"].get<double>(), arg["eta2"].get<double>());
    out["region_check"] = json{{"map1", region_check_json(su2_region_check(p1, 4))},
                               {"map2", region_check_json(su2_region_check(p2, 4))}};
  }
  out["argmax"] = std::move(arg);
  emit_json(out, output);
  return 0;
}

// ---------------------------------------------------------------------------
// fermion-entropy

int cmd_fermion_entropy(const std::string& input, const std::string& output,
                        int n, double tol) {
  const FermionSpecFile ff = fermion_spec_from_json(read_json_file(input));
  const FermionProcessSpec spec = fermion_process(ff.A, ff.B, ff.X);
  const QuadratureResult quad = entropy_rate_integral_adaptive(spec, tol);
  const TruncationEntropy te = entropy_rate_truncation(spec, n);

  json out;
  out["d"] = spec.d;
  out["invariant_symbol"] = mat_to_json(spec.Q);
  out["h_integral"] = quad.value;
  out["quadrature_points"] = quad.points;
  out["quadrature_converged"] = quad.converged;
  out["n"] = n;
  out["H_n"] = te.H.back();
  out["average_n"] = te.average.back();
  out["increment_n"] = te.increment.back();

  if (ends_with(output, ".csv")) {
    std::ostringstream csv;
    csv << "n,H_n,increment,integral_target\n";
    for (std::size_t k = 0; k < te.H.size(); ++k)
      csv << (k + 1) << ',' << fmt(te.H[k]) << ',' << fmt(te.increment[k])
          << ',' << fmt(quad.value) << '\n';
    write_text(output, csv.str());
    emit_json(out, "");
    return 0;
  }
  emit_json(out, output);
  return 0;
}

// ---------------------------------------------------------------------------
// szego-demo

int cmd_szego_demo(const std::string& output) {
  const ToeplitzSymbolFn tfn = ToeplitzSymbolFn::figure1();
  const std::vector<int> n_list = {1, 2, 4, 8, 16, 32, 64, 128};
  const std::vector<std::pair<std::string, std::function<double(double)>>> fns = {
      {"identity", [](double x) { return x; }},
      {"square", [](double x) { return x * x; }},
      {"binary_entropy", [](double x) {
         const double c = std::min(1.0, std::max(0.0, x));
         return binary_entropy(c);
       }}};

  json out;
  out["symbol"] = "0.5 + 0.2*cos(theta) + (1/3)*sin(2*theta)";
  json tables = json::object();
  for (const auto& [name, f] : fns) {
    json rows = json::array();
    for (const SzegoRow& row : szego_check(tfn, f, n_list))
      rows.push_back(json{{"n", row.n},
                          {"average", row.average},
                          {"increment", row.increment},
                          {"target", row.target}});
    tables[name] = std::move(rows);
  }
  out["tables"] = std::move(tables);
  emit_json(out, output);
  return 0;
}

// ---------------------------------------------------------------------------
// toeplitz-eigs

int cmd_toeplitz_eigs(const std::string& input, const std::string& output,
                      int n) {
  ToeplitzSymbolFn tfn = ToeplitzSymbolFn::figure1();
  if (!input.empty()) {
    const FermionSpecFile ff = fermion_spec_from_json(read_json_file(input));
    tfn = ToeplitzSymbolFn::from_process(fermion_process(ff.A, ff.B, ff.X));
  }
  const RVec eigs = toeplitz_eigs(tfn, n);

  std::ostringstream csv;
  csv << "n,index,value\n";
  for (Eigen::Index i = 0; i < eigs.size(); ++i)
    csv << n << ',' << i << ',' << fmt(eigs(i)) << '\n';
  write_text(output, csv.str());

  json summary;
  summary["n"] = n;
  summary["count"] = static_cast<long>(eigs.size());
  summary["min"] = eigs(0);
  summary["max"] = eigs(eigs.size() - 1);
  summary["output"] = output;
  emit_json(summary, "");
  return 0;
}

// ---------------------------------------------------------------------------
// report

void write_figure1_csv(const std::string& path) {
  const ToeplitzSymbolFn tfn = ToeplitzSymbolFn::figure1();
  std::ostringstream csv;
  csv << "theta,T\n";
  for (int j = 0; j < 1024; ++j) {
    const double theta = -pi_const + 2.0 * pi_const * j / 1024.0;
    csv << fmt(theta) << ',' << fmt(tfn.eval(theta)(0, 0).real()) << '\n';
  }
  write_text(path, csv.str());
}

void write_figure2_csv(const std::string& path) {
  const ToeplitzSymbolFn tfn = ToeplitzSymbolFn::figure1();
  std::ostringstream csv;
  csv << "n,index,value\n";
  auto emit = [&](int n) {
    const RVec eigs = toeplitz_eigs(tfn, n);
    for (Eigen::Index i = 0; i < eigs.size(); ++i)
      csv << n << ',' << i << ',' << fmt(eigs(i)) << '\n';
  };
  for (int n = 1; n <= 50; ++n) emit(n);
  emit(100);
  write_text(path, csv.str());
}

FermionProcessSpec shipped_fermion_spec(const std::string& name) {
  auto scalar = [](double v) { return Mat::Constant(1, 1, v); };
  if (name == "scalar")
    return fermion_process(scalar(0.6), scalar(0.5), scalar(-0.3));
  if (name == "normal_2x2") {
    Mat a(2, 2), b(2, 2), x(2, 2);
    a << 0.5, 0.2, -0.2, 0.5;
    b = 0.3 * Mat::Identity(2, 2);
    x = 0.05 * Mat::Identity(2, 2);
    return fermion_process(a, b, x);
  }
  if (name == "nonnormal_2x2") {
    Mat a(2, 2);
    a << 0.4, 0.3, 0.0, 0.45;
    const Mat b = 0.25 * Mat::Identity(2, 2);
    const Mat x = 0.02 * Mat::Identity(2, 2);
    return fermion_process(a, b, x);
  }
  throw usage_error("unknown shipped fermion spec: " + name);
}

int cmd_report(const std::string& outdir, std::uint64_t seed) {
  json report;

  json optima = json::object();
  for (const std::string mode : {"exchangeable", "separable", "su2_stationary",
                                 "period2", "three_qubit_su2"}) {
    const SingletOptimum opt = optimize_singlet(mode, seed);
    json arg = json::object();
    for (const auto& [k, v] : opt.argmax) arg[k] = v;
    optima[mode] = json{{"value", opt.value}, {"argmax", std::move(arg)}};
  }
  report["singlet_optima"] = std::move(optima);

  report["werner_ppt_threshold"] = werner_ppt_threshold();

  {
    const double a = 0.8, b = 0.6;
    const double d_crit = std::sqrt(0.5 * (1.0 - a) * (1.0 - b));
    report["davies_qubit_boundary"] =
        json{{"a", a},
             {"b", b},
             {"d_critical", d_crit},
             {"process_below", davies_process_condition(a, b, d_crit - 1e-6)},
             {"process_above", davies_process_condition(a, b, d_crit + 1e-6)}};
  }

  {
    json rates = json::object();
    for (const std::string name : {"scalar", "normal_2x2", "nonnormal_2x2"}) {
      const FermionProcessSpec spec = shipped_fermion_spec(name);
      const QuadratureResult quad = entropy_rate_integral_adaptive(spec);
      rates[name] = json{{"h", quad.value},
                         {"quadrature_points", quad.points},
                         {"converged", quad.converged}};
    }
    report["fermion_entropy_rates"] = std::move(rates);
  }

  // The asymptotic singlet density of the critical spin-1/2 chain is quoted
  // from the Bethe-ansatz literature; this library never computes it.
  report["heisenberg_chain_limit"] =
      json{{"value", 0.69314718055994531},
           {"expression", "log 2"},
           {"status", "cited"},
           {"note", "quoted constant; out of scope for computation here"}};

  std::error_code ec;
  std::filesystem::create_directories(outdir.empty() ? "." : outdir, ec);
  const std::string sep = outdir.empty() || outdir.back() == '/' ? "" : "/";
  write_figure1_csv(outdir + sep + "figure1.csv");
  write_figure2_csv(outdir + sep + "figure2.csv");
  report["artifacts"] =
      json::array({"figure1.csv", "figure2.csv", "report.json"});
  write_text(outdir + sep + "report.json", report.dump(2) + "\n");
  emit_json(report, "");
  return 0;
}

// ---------------------------------------------------------------------------
// validate

int cmd_validate(const std::string& input, const std::string& output) {
  const json j = read_json_file(input);
  json failures = json::array();
  auto fail = [&](const std::string& invariant, const std::string& message) {
    failures.push_back(json{{"invariant", invariant}, {"message", message}});
  };

  json out;
  const SpecKind kind = detect_spec_kind(j);
  switch (kind) {
    case SpecKind::markov: {
      out["kind"] = "markov";
      try {
        const MarkovSpecFile mf = markov_spec_from_json(j);
        const StochasticMatrix t(mf.T);
        out["ergodic"] = is_ergodic(t);
        if (mf.mu) check_stationarity(t, ProbVector(*mf.mu));
      } catch (const qproc::error& e) {
        fail(error_kind(e) == "compatibility" ? "stationarity" : "stochastic_matrix",
             e.what());
      }
      break;
    }
    case SpecKind::hmm: {
      out["kind"] = "hmm";
      try {
        const HmmSpecFile hf = hmm_spec_from_json(j);
        const HmmSpec spec(hf.E);
        out["d_hidden"] = spec.d_hidden();
        out["d_obs"] = spec.d_obs();
      } catch (const qproc::error& e) {
        fail("hmm_spec", e.what());
      }
      break;
    }
    case SpecKind::davies: {
      out["kind"] = "davies";
      try {
        const DaviesSpecFile df = davies_spec_from_json(j);
        const StochasticMatrix t(df.T);
        require_damping_matrix(t, df.D);
        std::optional<ProbVector> mu;
        if (df.mu) mu = ProbVector(*df.mu);
        const DaviesReport rep = davies_validate(t, df.D, mu);
        out["report"] = davies_report_json(rep);
        if (rep.detailed_balance_residual > 1e-9) {
          std::ostringstream os;
          os << "detailed balance residual " << rep.detailed_balance_residual;
          fail("detailed_balance", os.str());
        }
        if (!rep.cp) {
          std::ostringstream os;
          os << "mixed T/D matrix has eigenvalue " << rep.cp_matrix_min_eig;
          fail("complete_positivity", os.str());
        }
        if (!rep.cp_tests_agree)
          fail("cp_agreement", "mixed-matrix and Choi CP tests disagree");
      } catch (const qproc::error& e) {
        const std::string what = e.what();
        fail(what.find("symmetric") != std::string::npos ? "damping_symmetric"
                                                         : "davies_spec",
             what);
      }
      break;
    }
    case SpecKind::fermion: {
      out["kind"] = "fermion";
      try {
        const FermionSpecFile ff = fermion_spec_from_json(j);
        const FreeCpReport map_rep = free_cp_validate(ff.A, ff.B);
        if (!map_rep.b_psd) {
          std::ostringstream os;
          os << "lambda_min(B) = " << map_rep.b_min_eig;
          fail("b_psd", os.str());
        }
        if (!map_rep.contraction) {
          std::ostringstream os;
          os << "lambda_min(1 - A*A - B) = " << map_rep.contraction_min_eig;
          fail("map_contraction", os.str());
        }
        const ExtensionReport ext = extension_check(ff.A, ff.B, ff.X);
        if (!ext.exists) {
          std::ostringstream os;
          os << "lambda_min(1/2 - A*A) = " << ext.half_min_eig
             << ", lambda_min(1 - B - A*A) = " << ext.one_b_min_eig;
          fail("extension_exists", os.str());
        }
        if (!ext.cd_valid) {
          std::ostringstream os;
          os << "lambda_min(D) = " << ext.d_min_eig
             << ", lambda_min(1 - C*C - D) = " << ext.cd_gap_min_eig;
          fail("extension_cd", os.str());
        }
        const double sr = spectral_radius(ff.A);
        out["spectral_radius"] = sr;
        if (sr >= 1.0 - 1e-12) {
          std::ostringstream os;
          os << "spectral radius " << sr << " >= 1";
          fail("contractive", os.str());
        } else if (map_rep.valid) {
          const Symbol q = invariant_symbol(ff.A, ff.B);
          out["invariant_symbol"] = mat_to_json(q.matrix());
        }
      } catch (const qproc::error& e) {
        fail("fermion_spec", e.what());
      }
      break;
    }
  }

  out["valid"] = failures.empty();
  out["failures"] = std::move(failures);
  emit_json(out, output);
  return out["valid"].get<bool>() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "qproc: finitely correlated chain states, hidden Markov entropy rates, "
      "Davies maps, SU(2)-covariant optimization, and free-fermion "
      "processes.\n\nCSV outputs: eigenvalues.csv (n,index,value), "
      "entropy_curve.csv (n,H_n,increment,integral_target), figure1.csv "
      "(theta,T), figure2.csv (n,index,value), word tables (word,probability)."};
  app.require_subcommand(1);

  struct {
    std::string input, output;
    int n = -1;
  } markov_opts;
  struct {
    std::string input, output;
    long samples = 100000;
    int nmax = 8;
    std::uint64_t seed = 0;
    bool seed_given = false;
  } hmm_opts;
  struct {
    std::string input, output;
  } davies_opts;
  struct {
    std::string mode, output;
    double alpha = 0.0, mu = 0.0, eta = 0.0;
    std::optional<double> nu;
    int family = 0;
    int nmax = 0;
    std::uint64_t seed = 0;
    double tol = 1e-9;
  } fcs_opts;
  struct {
    std::string input, output;
    int n = 100;
    double tol = 1e-8;
  } fermion_opts;
  struct {
    std::string output;
  } szego_opts;
  struct {
    std::string input, output;
    int n = 100;
  } teig_opts;
  struct {
    std::string output = ".";
    std::uint64_t seed = 0;
  } report_opts;
  struct {
    std::string input, output;
  } validate_opts;

  auto* markov = app.add_subcommand(
      "markov", "Stationary chain report: invariant measure, entropy rate; "
                "--n adds the word law of n+1 consecutive symbols "
                "(CSV when --output ends in .csv)");
  markov->add_option("--input", markov_opts.input, "JSON spec file")->required();
  markov->add_option("--output", markov_opts.output, "output path ('-' or empty: stdout)");
  markov->add_option("--n", markov_opts.n, "joint word length minus one");

  auto* hmm = app.add_subcommand(
      "hmm-entropy", "Blackwell Monte Carlo entropy rate of a hidden Markov "
                     "spec plus exact entropy increments up to --nmax");
  hmm->add_option("--input", hmm_opts.input, "JSON spec file")->required();
  hmm->add_option("--output", hmm_opts.output, "output path ('-' or empty: stdout)");
  hmm->add_option("--samples", hmm_opts.samples, "Monte Carlo samples (default 100000)");
  hmm->add_option("--nmax", hmm_opts.nmax, "exact increments horizon (default 8)");
  hmm->add_option("--seed", hmm_opts.seed, "RNG seed (default: spec's, else 0)")
      ->each([&](const std::string&) { hmm_opts.seed_given = true; });

  auto* davies = app.add_subcommand(
      "davies-check", "Validation report for a (T, D) Davies spec: detailed "
                      "balance, triangle, mixed-matrix and Choi CP tests");
  davies->add_option("--input", davies_opts.input, "JSON spec file")->required();
  davies->add_option("--output", davies_opts.output, "output path ('-' or empty: stdout)");

  auto* fcs = app.add_subcommand(
      "fcs-su2", "SU(2)-covariant chain pipelines; --mode is one of "
                 "exchangeable|separable|su2_stationary|period2|"
                 "three_qubit_su2|eval|werner");
  fcs->add_option("--mode", fcs_opts.mode, "pipeline mode")->required();
  fcs->add_option("--alpha", fcs_opts.alpha, "alpha parameter (eval)");
  fcs->add_option("--mu", fcs_opts.mu, "mu parameter (eval)");
  fcs->add_option("--nu", fcs_opts.nu, "nu parameter (eval; defaults to mu)");
  fcs->add_option("--eta", fcs_opts.eta, "eta parameter (eval)");
  fcs->add_option("--family", fcs_opts.family, "CP-region family 3 or 4 (eval; 0 = auto)");
  fcs->add_option("--nmax", fcs_opts.nmax, "marginal entropy horizon (eval)");
  fcs->add_option("--seed", fcs_opts.seed, "optimizer seed");
  fcs->add_option("--tol", fcs_opts.tol, "werner bisection tolerance");
  fcs->add_option("--output", fcs_opts.output, "output path ('-' or empty: stdout)");

  auto* fermion = app.add_subcommand(
      "fermion-entropy", "Entropy rate of a free-fermion process spec: "
                         "quadrature value and truncation curve up to --n "
                         "(CSV when --output ends in .csv)");
  fermion->add_option("--input", fermion_opts.input, "JSON spec file")->required();
  fermion->add_option("--output", fermion_opts.output, "output path ('-' or empty: stdout)");
  fermion->add_option("--n", fermion_opts.n, "truncation horizon (default 100)");
  fermion->add_option("--tol", fermion_opts.tol, "quadrature doubling tolerance");

  auto* szego = app.add_subcommand(
      "szego-demo", "Szegő limit tables for the built-in scalar symbol with "
                    "f = identity, square, binary entropy");
  szego->add_option("--output", szego_opts.output, "output path ('-' or empty: stdout)");

  auto* teig = app.add_subcommand(
      "toeplitz-eigs", "Eigenvalues of the n-block Toeplitz compression "
                       "(built-in scalar symbol, or --input fermion spec)");
  teig->add_option("--input", teig_opts.input, "fermion spec file (optional)");
  teig->add_option("--output", teig_opts.output, "CSV path (default eigenvalues.csv)");
  teig->add_option("--n", teig_opts.n, "compression size (default 100)");

  auto* report = app.add_subcommand(
      "report", "Full results table (singlet optima, Werner threshold, Davies "
                "boundary, fermion entropy rates, cited constants) plus "
                "figure1.csv/figure2.csv; --output is the artifact directory");
  report->add_option("--output", report_opts.output, "artifact directory (default '.')");
  report->add_option("--seed", report_opts.seed, "optimizer seed");

  auto* validate = app.add_subcommand(
      "validate", "Run the owning module's invariant checks on a JSON spec; "
                  "exit 0 iff all pass, 1 with a failure list otherwise");
  validate->add_option("--input", validate_opts.input, "JSON spec file")->required();
  validate->add_option("--output", validate_opts.output, "output path ('-' or empty: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(markov))
      return cmd_markov(markov_opts.input, markov_opts.output, markov_opts.n);
    if (app.got_subcommand(hmm))
      return cmd_hmm_entropy(hmm_opts.input, hmm_opts.output, hmm_opts.samples,
                             hmm_opts.nmax, hmm_opts.seed_given, hmm_opts.seed);
    if (app.got_subcommand(davies))
      return cmd_davies_check(davies_opts.input, davies_opts.output);
    if (app.got_subcommand(fcs))
      return cmd_fcs_su2(fcs_opts.mode, fcs_opts.alpha, fcs_opts.mu,
                         fcs_opts.nu, fcs_opts.eta, fcs_opts.family,
                         fcs_opts.nmax, fcs_opts.seed, fcs_opts.tol,
                         fcs_opts.output);
    if (app.got_subcommand(fermion))
      return cmd_fermion_entropy(fermion_opts.input, fermion_opts.output,
                                 fermion_opts.n, fermion_opts.tol);
    if (app.got_subcommand(szego)) return cmd_szego_demo(szego_opts.output);
    if (app.got_subcommand(teig)) {
      if (teig_opts.output.empty()) teig_opts.output = "eigenvalues.csv";
      return cmd_toeplitz_eigs(teig_opts.input, teig_opts.output, teig_opts.n);
    }
    if (app.got_subcommand(report))
      return cmd_report(report_opts.output, report_opts.seed);
    if (app.got_subcommand(validate))
      return cmd_validate(validate_opts.input, validate_opts.output);
    std::cerr << app.help() << std::endl;
    return 2;
  } catch (const nlohmann::json::parse_error& e) {
    std::cerr << json{{"error", "json_parse"}, {"message", e.what()}}.dump(2)
              << std::endl;
    return 2;
  } catch (const usage_error& e) {
    std::cerr << json{{"error", "usage"}, {"message", e.what()}}.dump(2)
              << std::endl;
    return 2;
  } catch (const qproc::error& e) {
    std::cerr << json{{"error", error_kind(e)}, {"message", e.what()}}.dump(2)
              << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump(2)
              << std::endl;
    return 1;
  }
}
