#ifndef RADMM_BENCH_HPP
#define RADMM_BENCH_HPP

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "radmm/solvers.hpp"

namespace radmm {

enum class ExperimentKind {
  SpcaCompare,      // RADMM vs RSG on sparse PCA
  SpcaAdmmCompare,  // SOC vs MADMM vs RADMM on sparse PCA
  DpcpCompare,      // RADMM vs IRLS on DPCP
  DpcpAdmmCompare,  // SOC vs MADMM vs RADMM on DPCP
  InvariantSuite,   // runtime-invariant battery
};

inline std::string to_string(ExperimentKind e) {
  switch (e) {
    case ExperimentKind::SpcaCompare: return "SpcaCompare";
    case ExperimentKind::SpcaAdmmCompare: return "SpcaAdmmCompare";
    case ExperimentKind::DpcpCompare: return "DpcpCompare";
    case ExperimentKind::DpcpAdmmCompare: return "DpcpAdmmCompare";
    case ExperimentKind::InvariantSuite: return "InvariantSuite";
  }
  throw std::invalid_argument("unknown experiment kind");
}

inline ExperimentKind experiment_from_string(const std::string& s) {
  if (s == "SpcaCompare") return ExperimentKind::SpcaCompare;
  if (s == "SpcaAdmmCompare") return ExperimentKind::SpcaAdmmCompare;
  if (s == "DpcpCompare") return ExperimentKind::DpcpCompare;
  if (s == "DpcpAdmmCompare") return ExperimentKind::DpcpAdmmCompare;
  if (s == "InvariantSuite") return ExperimentKind::InvariantSuite;
  throw std::invalid_argument("unknown experiment: " + s);
}

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::SpcaCompare;
  int m = 50;
  int n = 300;
  int p = 50;
  int d = -1;  // DPCP subspace dimension; -1 means n - p
  int p1 = 500;
  int p2 = 1167;
  double mu = 0.5;
  int trials = 10;
  unsigned base_seed = 0;
  std::string output_dir = "out";
  // keyed by solver name ("radmm", "rsg", "soc", "madmm", "irls")
  std::map<std::string, SolverConfig> solvers;

  int dpcp_d() const { return d < 0 ? n - p : d; }

  void validate() const {
    if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    if (n < 1 || p < 1 || p > n)
      throw std::invalid_argument("config: need 1 <= p <= n");
    if (mu < 0) throw std::invalid_argument("config: mu must be >= 0");
    const bool is_spca = experiment == ExperimentKind::SpcaCompare ||
                         experiment == ExperimentKind::SpcaAdmmCompare;
    if (is_spca && (m < 1 || p > std::min(m, n)))
      throw std::invalid_argument("config: need 1 <= p <= min(m, n)");
    const bool is_dpcp = experiment == ExperimentKind::DpcpCompare ||
                         experiment == ExperimentKind::DpcpAdmmCompare;
    if (is_dpcp) {
      if (dpcp_d() >= n || dpcp_d() < 1)
        throw std::invalid_argument("config: need 1 <= d < n");
      if (p1 < 1 || p2 < 0)
        throw std::invalid_argument("config: need p1 >= 1, p2 >= 0");
    }
    for (const auto& [name, cfg] : solvers) cfg.validate();
  }
};

inline std::vector<std::string> solver_names(ExperimentKind e) {
  switch (e) {
    case ExperimentKind::SpcaCompare: return {"rsg", "radmm"};
    case ExperimentKind::SpcaAdmmCompare: return {"soc", "madmm", "radmm"};
    case ExperimentKind::DpcpCompare: return {"irls", "radmm"};
    case ExperimentKind::DpcpAdmmCompare: return {"soc", "madmm", "radmm"};
    case ExperimentKind::InvariantSuite: return {};
  }
  return {};
}

/// The default parameter grid: sPCA runs (n, p) = (300, 50), mu = 0.5 with
/// RADMM at rho = 100, gamma = 1e-8, eta = 1e-2; DPCP runs n = 30, p = 5,
/// p1 = 500, p2 = 1167 with RADMM at rho = 40, gamma = 4e-9, eta = 2e-4.
inline ExperimentConfig default_config(ExperimentKind e) {
  ExperimentConfig cfg;
  cfg.experiment = e;
  auto mk = [] {
    SolverConfig s;
    return s;
  };
  switch (e) {
    case ExperimentKind::SpcaCompare: {
      SolverConfig radmm = mk();
      radmm.rho = 100; radmm.gamma = 1e-8; radmm.eta = 1e-2;
      radmm.tol = 1e-8; radmm.max_iter = 1000;
      SolverConfig rsg = mk();
      rsg.eta = 1e-2; rsg.tol = 1e-8; rsg.max_iter = 1000;
      cfg.solvers = {{"radmm", radmm}, {"rsg", rsg}};
      break;
    }
    case ExperimentKind::SpcaAdmmCompare: {
      cfg.mu = 1.0;
      SolverConfig soc = mk();
      soc.rho = 50; soc.inner_eta = 1e-2; soc.tol = 0; soc.max_iter = 100;
      SolverConfig madmm = mk();
      madmm.rho = 100; madmm.inner_eta = 1e-2; madmm.tol = 0; madmm.max_iter = 100;
      SolverConfig radmm = mk();
      radmm.rho = 100; radmm.gamma = 1e-8; radmm.eta = 1e-2;
      radmm.tol = 0; radmm.max_iter = 100;
      cfg.solvers = {{"soc", soc}, {"madmm", madmm}, {"radmm", radmm}};
      break;
    }
    case ExperimentKind::DpcpCompare: {
      cfg.n = 30; cfg.p = 5; cfg.d = -1; cfg.p1 = 500; cfg.p2 = 1167;
      SolverConfig radmm = mk();
      radmm.rho = 40; radmm.gamma = 4e-9; radmm.eta = 2e-4;
      radmm.tol = 1e-6; radmm.max_iter = 2000;
      SolverConfig irls = mk();
      irls.tol = 1e-6; irls.max_iter = 2000;
      cfg.solvers = {{"irls", irls}, {"radmm", radmm}};
      break;
    }
    case ExperimentKind::DpcpAdmmCompare: {
      cfg.n = 30; cfg.p = 5; cfg.d = -1; cfg.p1 = 500; cfg.p2 = 1167;
      SolverConfig soc = mk();
      soc.rho = 50; soc.inner_eta = 5e-6; soc.tol = 0; soc.max_iter = 2000;
      SolverConfig madmm = mk();
      madmm.rho = 50; madmm.inner_eta = 1e-6; madmm.tol = 0; madmm.max_iter = 2000;
      SolverConfig radmm = mk();
      radmm.rho = 50; radmm.gamma = 1e-9; radmm.eta = 1e-4;
      radmm.tol = 0; radmm.max_iter = 2000;
      cfg.solvers = {{"soc", soc}, {"madmm", madmm}, {"radmm", radmm}};
      break;
    }
    case ExperimentKind::InvariantSuite: {
      cfg.n = 20; cfg.p = 3; cfg.m = 20; cfg.mu = 0.5; cfg.trials = 1;
      break;
    }
  }
  return cfg;
}

namespace detail {

inline RetractionKind retraction_from_string(const std::string& s) {
  if (s == "qr") return RetractionKind::QR;
  if (s == "polar") return RetractionKind::Polar;
  throw std::invalid_argument("unknown retraction: " + s);
}

inline std::string retraction_to_string(RetractionKind k) {
  return k == RetractionKind::QR ? "qr" : "polar";
}

inline void apply_solver_json(SolverConfig& s, const nlohmann::json& j,
                              const std::string& solver) {
  for (const auto& [key, val] : j.items()) {
    if (key == "rho") s.rho = val.get<double>();
    else if (key == "gamma") s.gamma = val.get<double>();
    else if (key == "eta") s.eta = val.get<double>();
    else if (key == "max_iter") s.max_iter = val.get<int>();
    else if (key == "tol") s.tol = val.get<double>();
    else if (key == "inner_iters") s.inner_iters = val.get<int>();
    else if (key == "inner_eta") s.inner_eta = val.get<double>();
    else if (key == "irls_delta") s.irls_delta = val.get<double>();
    else if (key == "theory_mode") s.theory_mode = val.get<bool>();
    else if (key == "epsilon") s.epsilon = val.get<double>();
    else if (key == "retraction") s.retraction = retraction_from_string(val.get<std::string>());
    else
      throw std::invalid_argument("config: unknown key solvers." + solver + "." + key);
  }
}

}  // namespace detail

/// Parse a JSON experiment config. Missing keys take the experiment's
/// defaults; unknown keys are rejected.
inline ExperimentConfig parse_config(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.contains("experiment"))
    throw std::invalid_argument("config: missing required key 'experiment'");
  ExperimentConfig cfg =
      default_config(experiment_from_string(j.at("experiment").get<std::string>()));
  for (const auto& [key, val] : j.items()) {
    if (key == "experiment") continue;
    else if (key == "m") cfg.m = val.get<int>();
    else if (key == "n") cfg.n = val.get<int>();
    else if (key == "p") cfg.p = val.get<int>();
    else if (key == "d") cfg.d = val.get<int>();
    else if (key == "p1") cfg.p1 = val.get<int>();
    else if (key == "p2") cfg.p2 = val.get<int>();
    else if (key == "mu") cfg.mu = val.get<double>();
    else if (key == "trials") cfg.trials = val.get<int>();
    else if (key == "base_seed") cfg.base_seed = val.get<unsigned>();
    else if (key == "output_dir") cfg.output_dir = val.get<std::string>();
    else if (key == "solvers") {
      for (const auto& [solver, overrides] : val.items()) {
        auto it = cfg.solvers.find(solver);
        if (it == cfg.solvers.end())
          throw std::invalid_argument("config: unknown solver '" + solver +
                                      "' for experiment " + to_string(cfg.experiment));
        detail::apply_solver_json(it->second, overrides, solver);
      }
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

inline std::string serialize_config(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["experiment"] = to_string(cfg.experiment);
  j["m"] = cfg.m;
  j["n"] = cfg.n;
  j["p"] = cfg.p;
  j["d"] = cfg.d;
  j["p1"] = cfg.p1;
  j["p2"] = cfg.p2;
  j["mu"] = cfg.mu;
  j["trials"] = cfg.trials;
  j["base_seed"] = cfg.base_seed;
  j["output_dir"] = cfg.output_dir;
  nlohmann::ordered_json solvers = nlohmann::ordered_json::object();
  for (const auto& [name, s] : cfg.solvers) {
    nlohmann::ordered_json sj;
    sj["rho"] = s.rho;
    sj["gamma"] = s.gamma;
    sj["eta"] = s.eta;
    sj["max_iter"] = s.max_iter;
    sj["tol"] = s.tol;
    sj["inner_iters"] = s.inner_iters;
    sj["inner_eta"] = s.inner_eta;
    sj["irls_delta"] = s.irls_delta;
    sj["theory_mode"] = s.theory_mode;
    sj["epsilon"] = s.epsilon;
    sj["retraction"] = detail::retraction_to_string(s.retraction);
    solvers[name] = sj;
  }
  j["solvers"] = solvers;
  return j.dump(2) + "\n";
}

struct SummaryRow {
  std::string solver;
  double obj = 0;
  double cpu_seconds = 0;
  double sparsity = 0;
  double infeas = 0;
  int trials_averaged = 0;
};

struct TrialTrace {
  std::string solver;
  int trial = 0;
  std::vector<IterateRecord> trace;
  bool diverged = false;
};

struct ExperimentResult {
  std::vector<SummaryRow> summary;
  std::vector<TrialTrace> traces;
  std::vector<std::uint64_t> data_checksums;  // one per trial, shared by solvers
};

namespace detail {

inline std::uint64_t fnv1a_checksum(const Matrix& M) {
  std::uint64_t h = 1469598103934665603ull;
  const auto* bytes = reinterpret_cast<const unsigned char*>(M.data());
  const std::size_t nbytes = static_cast<std::size_t>(M.size()) * sizeof(double);
  for (std::size_t i = 0; i < nbytes; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline Matrix spectral_init(const Matrix& Y, int p) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(Y * Y.transpose());
  return Matrix(es.eigenvectors().leftCols(p));
}

}  // namespace detail

/// Run all solvers of the configured experiment over `trials` independent
/// datasets. All solvers in a trial share the data matrix and starting point.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.experiment == ExperimentKind::InvariantSuite)
    throw std::invalid_argument(
        "run_experiment: InvariantSuite runs through run_invariant_suite()");

  ExperimentResult result;
  const auto names = solver_names(cfg.experiment);
  struct Acc {
    double obj = 0, cpu = 0, spa = 0, infeas = 0;
    int count = 0;
  };
  std::map<std::string, Acc> acc;

  for (int trial = 0; trial < cfg.trials; ++trial) {
    const unsigned seed = cfg.base_seed + static_cast<unsigned>(trial);
    const bool is_spca = cfg.experiment == ExperimentKind::SpcaCompare ||
                         cfg.experiment == ExperimentKind::SpcaAdmmCompare;

    CompositeProblem prob;
    Matrix data;
    StiefelPoint x0 = random_stiefel(cfg.n, cfg.p, seed ^ 0x9e3779b9u);
    if (is_spca) {
      data = gen_gaussian(cfg.m, cfg.n, seed);
      prob = spca_problem(data, cfg.mu, cfg.p);
    } else {
      DpcpDataset ds = gen_dpcp_data(cfg.n, cfg.dpcp_d(), cfg.p1, cfg.p2, seed);
      data = ds.Y;
      prob = dpcp_problem(data, cfg.p);
      if (cfg.experiment == ExperimentKind::DpcpCompare)
        x0 = StiefelPoint(detail::spectral_init(data, cfg.p));
    }
    result.data_checksums.push_back(detail::fnv1a_checksum(data));

    for (const auto& name : names) {
      const SolverConfig& scfg = cfg.solvers.at(name);
      TrialTrace tt;
      tt.solver = name;
      tt.trial = trial;
      if (name == "radmm") {
        RadmmResult r = radmm_solve(prob, scfg, x0);
        tt.trace = std::move(r.trace);
        tt.diverged = r.diverged;
      } else {
        SolveResult r = name == "rsg"    ? rsg_solve(prob, scfg, x0)
                        : name == "soc"  ? soc_solve(prob, scfg, x0)
                        : name == "madmm" ? madmm_solve(prob, scfg, x0)
                                          : irls_solve(data, cfg.p, scfg);
        tt.trace = std::move(r.trace);
        tt.diverged = r.diverged;
      }
      if (!tt.diverged && !tt.trace.empty()) {
        const IterateRecord& last = tt.trace.back();
        Acc& a = acc[name];
        a.obj += last.obj;
        a.cpu += last.elapsed;
        a.spa += last.sparsity;
        a.infeas += last.infeas;
        ++a.count;
      }
      result.traces.push_back(std::move(tt));
    }
  }

  for (const auto& name : names) {
    const Acc& a = acc[name];
    SummaryRow row;
    row.solver = name;
    row.trials_averaged = a.count;
    if (a.count > 0) {
      row.obj = a.obj / a.count;
      row.cpu_seconds = a.cpu / a.count;
      row.sparsity = a.spa / a.count;
      row.infeas = a.infeas / a.count;
    }
    result.summary.push_back(row);
  }
  return result;
}

namespace detail {

inline std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// One trace file per (solver, trial) plus summary.csv and
/// trial_checksums.csv. 17 significant digits, LF line endings, no locale.
inline void emit_csv(const ExperimentResult& result, const std::string& output_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(output_dir);
  auto open = [](const fs::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("emit_csv: cannot open " + p.string());
    return f;
  };

  for (const TrialTrace& tt : result.traces) {
    auto f = open(fs::path(output_dir) /
                  ("trace_" + tt.solver + "_trial" + std::to_string(tt.trial) + ".csv"));
    f << "k,elapsed_s,obj,auglag,infeas,sparsity,stationarity\n";
    for (const IterateRecord& r : tt.trace)
      f << r.k << ',' << detail::fmt17(r.elapsed) << ',' << detail::fmt17(r.obj)
        << ',' << detail::fmt17(r.auglag) << ',' << detail::fmt17(r.infeas) << ','
        << detail::fmt17(r.sparsity) << ',' << detail::fmt17(r.stationarity)
        << '\n';
  }

  {
    auto f = open(fs::path(output_dir) / "summary.csv");
    f << "solver,obj,cpu_s,sparsity,infeas,trials\n";
    for (const SummaryRow& row : result.summary)
      f << row.solver << ',' << detail::fmt17(row.obj) << ','
        << detail::fmt17(row.cpu_seconds) << ',' << detail::fmt17(row.sparsity)
        << ',' << detail::fmt17(row.infeas) << ',' << row.trials_averaged << '\n';
  }

  {
    auto f = open(fs::path(output_dir) / "trial_checksums.csv");
    f << "trial,checksum\n";
    for (std::size_t t = 0; t < result.data_checksums.size(); ++t)
      f << t << ',' << result.data_checksums[t] << '\n';
  }
}

/// Runtime-invariant battery behind the `check` CLI verb: smoothing-envelope
/// properties on random samples plus the per-iteration ADMM identities (the
/// solver itself throws if those fail mid-run).
inline std::vector<std::pair<std::string, bool>> run_invariant_suite(
    unsigned seed = 0) {
  std::vector<std::pair<std::string, bool>> results;
  auto check = [&](const std::string& name, bool ok) {
    results.emplace_back(name, ok);
  };
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.05, 2.0);

  // Moreau envelope sandwich, gradient bound, Lipschitz properties.
  bool sandwich = true, grad_bound = true, smooth = true;
  for (int i = 0; i < 500; ++i) {
    NonsmoothTerm g = NonsmoothTerm::weighted_l1(unif(rng), 3, 2);
    const double gamma = unif(rng);
    Matrix Z(3, 2), Z2(3, 2);
    for (int j = 0; j < Z.size(); ++j) {
      Z(j) = 3 * gauss(rng);
      Z2(j) = 3 * gauss(rng);
    }
    const double lg = g.lipschitz();
    const double gap = g.value(Z) - moreau_value(g, gamma, Z);
    if (gap < -1e-12 || gap > gamma * lg * lg + 1e-10) sandwich = false;
    if (moreau_gradient(g, gamma, Z).norm() > lg + 1e-10) grad_bound = false;
    const double dg =
        (moreau_gradient(g, gamma, Z) - moreau_gradient(g, gamma, Z2)).norm();
    if (dg > (Z - Z2).norm() / gamma + 1e-10) smooth = false;
  }
  check("moreau envelope sandwich", sandwich);
  check("moreau gradient bounded by L_g", grad_bound);
  check("moreau gradient 1/gamma-Lipschitz", smooth);

  // The solver asserts the per-iteration identities internally; a completed
  // run means they held.
  bool admm_ok = true;
  try {
    Matrix A = gen_gaussian(20, 20, seed + 1);
    CompositeProblem prob = spca_problem(A, 0.5, 3);
    SolverConfig cfg;
    cfg.rho = 10;
    cfg.gamma = 1e-3;
    cfg.eta = 1e-3;
    cfg.tol = 0;
    cfg.max_iter = 200;
    radmm_solve(prob, cfg, random_stiefel(20, 3, seed + 2));
  } catch (const std::exception&) {
    admm_ok = false;
  }
  check("radmm per-iteration identities (200 iterations)", admm_ok);

  bool theory_ok = true;
  try {
    Matrix A = gen_gaussian(10, 10, seed + 3);
    CompositeProblem prob = spca_problem(A, 0.1, 2);
    SolverConfig cfg;
    cfg.theory_mode = true;
    cfg.epsilon = 0.5;
    cfg.tol = 0;
    cfg.max_iter = 300;
    radmm_solve(prob, cfg, random_stiefel(10, 2, seed + 4));
  } catch (const std::exception&) {
    theory_ok = false;
  }
  check("augmented Lagrangian monotone under theory parameters", theory_ok);

  return results;
}

}  // namespace radmm

#endif  // RADMM_BENCH_HPP
