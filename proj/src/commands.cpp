#include "jointgraph/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "jointgraph/errors.hpp"
#include "jointgraph/io.hpp"
#include "jointgraph/parallel.hpp"
#include "jointgraph/simulate.hpp"

#ifndef JOINTGRAPH_VERSION
#define JOINTGRAPH_VERSION "0.0.0"
#endif

namespace jointgraph::cli {

using io::json;

std::string version() { return JOINTGRAPH_VERSION; }

Method parse_method(const std::string& name) {
  if (name == "jfggm") return Method::kJfggm;
  if (name == "fglasso" || name == "fggm") return Method::kFglasso;
  throw ConfigError("unknown method '" + name + "' (expected jfggm or fglasso)");
}

std::string method_name(Method m) { return m == Method::kJfggm ? "jfggm" : "fglasso"; }

JointProblem problem_from_panels(const std::vector<CurvePanel>& panels, int M, ScoreScale scale) {
  if (panels.empty()) throw InputError("no curve groups");
  JointProblem problem;
  for (const auto& panel : panels) problem.sigmas.push_back(estimate_sigma(panel, M, scale));
  problem.validate();
  return problem;
}

JointEstimate fit_method(const JointProblem& problem, Method method, double lambda,
                         const FitParams& params) {
  if (method == Method::kFglasso) return separate_fit(problem, lambda, params.admm);
  return fit(problem, params.lambda0.value_or(lambda), lambda, params.steps, params.admm,
             params.weight_cap);
}

namespace {

void strip_matrices(JointEstimate& est) {
  for (auto& f : est.fits) {
    f.omega = BlockMatrix();
    f.z = BlockMatrix();
    f.v = BlockMatrix();
  }
}

}  // namespace

SweepResult sweep(const JointProblem& problem, const std::vector<Method>& methods,
                  std::span<const double> grid, const FitParams& params, int jobs,
                  bool keep_matrices) {
  problem.validate();
  const bool want_fglasso =
      std::find(methods.begin(), methods.end(), Method::kFglasso) != methods.end();
  const bool want_jfggm = std::find(methods.begin(), methods.end(), Method::kJfggm) != methods.end();

  SweepResult out;
  out.lambdas.assign(grid.begin(), grid.end());
  if (want_fglasso) out.fglasso.resize(grid.size());
  if (want_jfggm) out.jfggm.resize(grid.size());

  parallel_for(grid.size(), jobs, [&](std::size_t g) {
    const double lambda = grid[g];
    const double lambda0 = params.lambda0.value_or(lambda);
    std::vector<SolveResult> init = initial_fit(problem, lambda0, params.admm);
    if (want_fglasso) {
      JointEstimate est = lambda0 == lambda ? JointEstimate{} : separate_fit(problem, lambda, params.admm);
      if (lambda0 == lambda) {
        est.lambda = lambda;
        est.lambda0 = lambda;
        est.weights = WeightMatrix::unit(problem.p());
        est.fits = init;
        for (const auto& f : est.fits) est.edge_sets.push_back(extract_edges(f));
        est.common_edges = intersect(est.edge_sets);
      }
      if (!keep_matrices) strip_matrices(est);
      out.fglasso[g] = std::move(est);
    }
    if (want_jfggm) {
      JointEstimate est = refine(problem, std::move(init), lambda0, lambda, params.steps,
                                 params.admm, params.weight_cap);
      if (!keep_matrices) strip_matrices(est);
      out.jfggm[g] = std::move(est);
    }
  });
  return out;
}

double mean_density(const std::vector<EdgeSet>& edge_sets, int p) {
  if (edge_sets.empty() || p < 2) return 0.0;
  double total = 0.0;
  for (const auto& e : edge_sets) total += static_cast<double>(e.size());
  return total / (static_cast<double>(edge_sets.size()) * static_cast<double>(pair_count(p)));
}

SparsitySearch search_target_sparsity(const JointProblem& problem, Method method, double target,
                                      const FitParams& params, double tolerance) {
  if (!(target >= 0 && target <= 1)) throw ConfigError("target sparsity must lie in [0, 1]");
  SparsitySearch best;
  double best_gap = std::numeric_limits<double>::infinity();
  auto evaluate = [&](double lambda) {
    JointEstimate est = fit_method(problem, method, lambda, params);
    const double d = mean_density(est.edge_sets, problem.p());
    ++best.evaluations;
    const double gap = std::abs(d - target);
    if (gap < best_gap || (gap == best_gap && lambda < best.lambda)) {
      best_gap = gap;
      best.lambda = lambda;
      best.density = d;
      best.estimate = std::move(est);
    }
    return d;
  };

  double lo = 0.0;
  double hi = 1.0;
  if (std::abs(evaluate(lo) - target) <= tolerance) {
    best.bisection_hit = true;
    return best;
  }
  double d_hi = evaluate(hi);
  for (int i = 0; i < 40 && d_hi > target + tolerance; ++i) {
    lo = hi;
    hi *= 2.0;
    d_hi = evaluate(hi);
  }
  if (std::abs(d_hi - target) <= tolerance) {
    best.bisection_hit = true;
    return best;
  }
  for (int i = 0; i < 40; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double d = evaluate(mid);
    if (std::abs(d - target) <= tolerance) {
      best.bisection_hit = true;
      return best;
    }
    if (d > target) lo = mid; else hi = mid;
  }
  // Density was not monotone enough for bisection; scan instead.
  constexpr int kScan = 50;
  for (int i = 0; i <= kScan; ++i) {
    evaluate(hi * i / kScan);
    if (best_gap <= tolerance) break;
  }
  best.bisection_hit = false;
  return best;
}

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("JOINTGRAPH_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw, &end, 10);
  if (*end != '\0') throw ConfigError("JOINTGRAPH_SEED must be a nonnegative integer");
  return static_cast<std::uint64_t>(v);
}

namespace {

json weights_to_json(const WeightMatrix& w) {
  json rows = json::array();
  for (int j = 0; j < w.p(); ++j) {
    json row = json::array();
    for (int l = 0; l < w.p(); ++l) {
      const double t = w(j, l);
      if (std::isinf(t)) row.push_back("inf"); else row.push_back(t);
    }
    rows.push_back(row);
  }
  return rows;
}

json estimate_to_json(const JointEstimate& est, Method method, bool matrices) {
  json j{{"lambda", est.lambda}, {"lambda0", est.lambda0}};
  j["edge_sets"] = json::array();
  for (const auto& e : est.edge_sets) j["edge_sets"].push_back(io::edges_to_json(e));
  j["common_edges"] = io::edges_to_json(est.common_edges);
  if (method == Method::kJfggm && est.weights.p() > 0) j["weights"] = weights_to_json(est.weights);
  j["groups"] = json::array();
  for (const auto& f : est.fits) {
    json g{{"iterations", f.iterations},
           {"primal_residual", f.primal_residual},
           {"dual_residual", f.dual_residual},
           {"converged", f.converged},
           {"final_b", f.final_b}};
    if (matrices && f.omega.p() > 0) {
      g["omega"] = io::matrix_to_json(f.omega);
      g["z"] = io::matrix_to_json(f.z);
    }
    j["groups"].push_back(std::move(g));
  }
  return j;
}

json fit_params_to_json(const FitParams& p) {
  json j{{"M", p.M},
         {"steps", p.steps},
         {"admm", io::admm_settings_to_json(p.admm)},
         {"score_scale", p.scale == ScoreScale::kL2 ? "l2" : "grid_unit"},
         {"weight_cap", p.weight_cap}};
  j["lambda0"] = p.lambda0 ? json(*p.lambda0) : json(nullptr);
  return j;
}

json manifest(const std::string& command, json parameters, std::optional<std::uint64_t> seed,
              json inputs, json outputs) {
  json m{{"tool", "jointgraph"}, {"version", version()}, {"command", command}};
  m["parameters"] = std::move(parameters);
  m["seed"] = seed ? json(*seed) : json(nullptr);
  m["inputs"] = std::move(inputs);
  m["outputs"] = std::move(outputs);
  return m;
}

// Writes each file atomically and records its fingerprint.
json write_outputs(const fs::path& dir, const std::vector<std::pair<std::string, std::string>>& files) {
  json fps = json::object();
  for (const auto& [name, content] : files) {
    io::write_file_atomic(dir / name, content);
    fps[name] = io::fingerprint(content);
  }
  return fps;
}

int count_nonconverged(const JointEstimate& est) {
  int n = 0;
  for (const auto& f : est.fits) n += f.converged ? 0 : 1;
  return n;
}

std::string roc_csv(const RocCurve& curve) {
  std::string out = "lambda,afpr,atpr\n";
  for (const auto& pt : curve.points) {
    out += io::format_double(pt.lambda) + ',' + io::format_double(pt.afpr) + ',' +
           io::format_double(pt.atpr) + '\n';
  }
  return out;
}

json roc_summary(const RocCurve& curve) {
  return json{{"auc", curve.auc},
              {"replicate_auc", curve.replicate_auc},
              {"replicates", curve.replicates},
              {"failures", curve.failures}};
}

struct LoadedCurves {
  std::vector<CurvePanel> panels;
  json inputs;
};

LoadedCurves load_curves(const fs::path& curves_path, const fs::path& grid_path) {
  const std::string grid_text = io::read_file(grid_path);
  const std::string curve_text = io::read_file(curves_path);
  LoadedCurves out;
  out.panels = io::curves_from_csv(curve_text, io::grid_from_json(json::parse(grid_text)));
  out.inputs = json{{curves_path.filename().string(), io::fingerprint(curve_text)},
                    {grid_path.filename().string(), io::fingerprint(grid_text)}};
  return out;
}

std::vector<EdgeSet> edge_sets_of(const JointEstimate& est) { return est.edge_sets; }

std::vector<std::vector<EdgeSet>> sweep_edges(const std::vector<JointEstimate>& ests) {
  std::vector<std::vector<EdgeSet>> out;
  out.reserve(ests.size());
  for (const auto& e : ests) out.push_back(edge_sets_of(e));
  return out;
}

template <typename Fn>
int guarded(std::ostream& log, Fn&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace

int cmd_simulate(const SimulateOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    SimConfig config = io::sim_config_from_json(json::parse(io::read_file(opts.config)));
    if (auto seed = env_seed()) config.seed = *seed;
    config.validate();

    const SimulatedDataset ds = simulate(config, 0);
    std::vector<CurvePanel> panels;
    for (const auto& g : ds.groups) panels.push_back(g.panel);

    const io::GridInfo grid{config.t_start, config.t_end, config.nu};
    const json config_json = io::sim_config_to_json(config);
    json outputs = write_outputs(
        opts.out, {{"curves.csv", io::curves_to_csv(panels)},
                   {"grid.json", io::dump(io::grid_to_json(grid))},
                   {"ground_truth.json", io::dump(io::ground_truth_to_json(ds.truth, config.p, config.M))},
                   {"config.json", io::dump(config_json)}});
    io::write_file_atomic(opts.out / "manifest.json",
                          io::dump(manifest("simulate", config_json, config.seed,
                                            json::object(), std::move(outputs))));
    log << "simulated " << config.K << " groups, p=" << config.p << ", n=" << config.n
        << ", |A|=" << ds.truth.common.size() << " -> " << opts.out.string() << "\n";
    return kExitOk;
  });
}

int cmd_fit(const FitOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    const int modes = (opts.lambda ? 1 : 0) + (opts.lambdas.empty() ? 0 : 1) +
                      (opts.default_grid ? 1 : 0) + (opts.target_sparsity ? 1 : 0);
    if (modes != 1) {
      throw ConfigError("give exactly one of --lambda, --lambdas, --grid, --target-sparsity");
    }
    const fs::path curves = opts.curves.empty() ? opts.dataset / "curves.csv" : opts.curves;
    const fs::path grid_path = opts.grid.empty() ? opts.dataset / "grid.json" : opts.grid;
    const LoadedCurves loaded = load_curves(curves, grid_path);
    const JointProblem problem = problem_from_panels(loaded.panels, opts.params.M, opts.params.scale);

    json params = fit_params_to_json(opts.params);
    params["method"] = method_name(opts.method);
    params["jobs_independent"] = true;

    json doc{{"method", method_name(opts.method)},
             {"p", problem.p()},
             {"M", problem.M()},
             {"K", problem.K()}};
    doc["groups"] = json::array();
    for (const auto& panel : loaded.panels) doc["groups"].push_back(panel.group_id);
    doc["fits"] = json::array();

    int nonconverged = 0;
    if (opts.target_sparsity) {
      params["target_sparsity"] = *opts.target_sparsity;
      const SparsitySearch search =
          search_target_sparsity(problem, opts.method, *opts.target_sparsity, opts.params);
      doc["target_sparsity"] = json{{"target", *opts.target_sparsity},
                                    {"lambda", search.lambda},
                                    {"density", search.density},
                                    {"evaluations", search.evaluations},
                                    {"bisection_hit", search.bisection_hit}};
      doc["fits"].push_back(estimate_to_json(search.estimate, opts.method, true));
      nonconverged += count_nonconverged(search.estimate);
      log << "target sparsity " << *opts.target_sparsity << ": lambda=" << search.lambda
          << " density=" << search.density << "\n";
    } else if (opts.lambda) {
      params["lambda"] = *opts.lambda;
      const JointEstimate est = fit_method(problem, opts.method, *opts.lambda, opts.params);
      doc["fits"].push_back(estimate_to_json(est, opts.method, true));
      nonconverged += count_nonconverged(est);
    } else {
      const std::vector<double> grid = opts.default_grid ? lambda_grid() : opts.lambdas;
      params["lambdas"] = grid;
      const SweepResult res =
          sweep(problem, {opts.method}, grid, opts.params, opts.jobs, opts.matrices);
      const auto& ests = opts.method == Method::kJfggm ? res.jfggm : res.fglasso;
      for (const auto& est : ests) {
        doc["fits"].push_back(estimate_to_json(est, opts.method, opts.matrices));
        nonconverged += count_nonconverged(est);
      }
    }

    json outputs = write_outputs(opts.out, {{"estimates.json", io::dump(doc)}});
    io::write_file_atomic(opts.out / "manifest.json",
                          io::dump(manifest("fit", params, std::nullopt, loaded.inputs,
                                            std::move(outputs))));
    if (nonconverged > 0) {
      log << "warning: " << nonconverged << " solve(s) hit max_iter without converging\n";
      if (opts.strict) return kExitNotConverged;
    }
    log << "wrote " << (opts.out / "estimates.json").string() << "\n";
    return kExitOk;
  });
}

int cmd_evaluate(const EvaluateOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    const fs::path truth_path = opts.dataset / "ground_truth.json";
    if (!fs::exists(truth_path)) {
      throw std::runtime_error("missing ground truth: " + truth_path.string());
    }
    const std::string truth_text = io::read_file(truth_path);
    const json truth_json = json::parse(truth_text);
    const GroundTruth truth0 = io::ground_truth_from_json(truth_json);
    const int p = truth_json.at("p").get<int>();
    if (opts.estimates.empty() == opts.methods.empty()) {
      throw ConfigError("give either --estimates files or --method, not both");
    }

    json inputs{{"ground_truth.json", io::fingerprint(truth_text)}};
    json params{{"replicates", opts.replicates}};
    std::vector<std::pair<std::string, std::string>> files;
    json summary = json::object();

    if (!opts.estimates.empty()) {
      for (const auto& path : opts.estimates) {
        const std::string text = io::read_file(path);
        inputs[path.filename().string()] = io::fingerprint(text);
        const json doc = json::parse(text);
        const std::string method = doc.at("method").get<std::string>();
        std::vector<double> grid;
        std::vector<std::vector<EdgeSet>> sweep_sets;
        for (const auto& f : doc.at("fits")) {
          grid.push_back(f.at("lambda").get<double>());
          std::vector<EdgeSet> sets;
          for (const auto& e : f.at("edge_sets")) sets.push_back(io::edges_from_json(e));
          sweep_sets.push_back(std::move(sets));
        }
        const RocCurve curve = roc_from_sweeps({truth0.full}, p, {sweep_sets}, grid);
        files.push_back({"roc_" + method + ".csv", roc_csv(curve)});
        summary[method] = roc_summary(curve);
        log << method << ": AUC = " << curve.auc << "\n";
      }
    } else {
      if (opts.replicates < 1) throw ConfigError("replicates must be >= 1");
      const std::vector<double> grid = opts.grid.empty() ? lambda_grid() : opts.grid;
      params["lambdas"] = grid;
      params["fit"] = fit_params_to_json(opts.params);
      std::optional<SimConfig> config;
      if (opts.replicates > 1) {
        const fs::path cfg = opts.dataset / "config.json";
        if (!fs::exists(cfg)) throw std::runtime_error("replicates > 1 need " + cfg.string());
        const std::string text = io::read_file(cfg);
        inputs["config.json"] = io::fingerprint(text);
        config = io::sim_config_from_json(json::parse(text));
      }

      std::vector<std::vector<EdgeSet>> truths;
      std::vector<std::vector<std::vector<EdgeSet>>> f_sweeps, j_sweeps;
      for (int r = 0; r < opts.replicates; ++r) {
        std::vector<CurvePanel> panels;
        if (r == 0) {
          LoadedCurves loaded = load_curves(opts.dataset / "curves.csv", opts.dataset / "grid.json");
          inputs.update(loaded.inputs);
          panels = std::move(loaded.panels);
          truths.push_back(truth0.full);
        } else {
          SimulatedDataset ds = simulate(*config, static_cast<std::uint32_t>(r));
          for (auto& g : ds.groups) panels.push_back(std::move(g.panel));
          truths.push_back(ds.truth.full);
        }
        const JointProblem problem = problem_from_panels(panels, opts.params.M, opts.params.scale);
        const SweepResult res = sweep(problem, opts.methods, grid, opts.params, opts.jobs);
        f_sweeps.push_back(sweep_edges(res.fglasso));
        j_sweeps.push_back(sweep_edges(res.jfggm));
      }
      for (Method m : opts.methods) {
        const RocCurve curve = roc_from_sweeps(
            truths, p, m == Method::kJfggm ? j_sweeps : f_sweeps, grid);
        files.push_back({"roc_" + method_name(m) + ".csv", roc_csv(curve)});
        summary[method_name(m)] = roc_summary(curve);
        log << method_name(m) << ": AUC = " << curve.auc << "\n";
      }
    }

    files.push_back({"summary.json", io::dump(summary)});
    json outputs = write_outputs(opts.out, files);
    io::write_file_atomic(opts.out / "manifest.json",
                          io::dump(manifest("evaluate", params, std::nullopt, inputs,
                                            std::move(outputs))));
    return kExitOk;
  });
}

Scenario parse_scenario(const std::string& id) {
  std::string text = id;
  for (char& c : text)
    if (c == '_' || c == '-') c = ',';
  std::istringstream in(text);
  std::string a, b, c, extra;
  if (!std::getline(in, a, ',') || !std::getline(in, b, ',') || !std::getline(in, c, ',') ||
      std::getline(in, extra, ',')) {
    throw ConfigError("scenario must look like p,n,rho (e.g. 80,100,0)");
  }
  Scenario s;
  try {
    s.p = std::stoi(a);
    s.n = std::stoi(b);
    s.rho = std::stod(c);
  } catch (const std::exception&) {
    throw ConfigError("scenario '" + id + "' is not numeric");
  }
  const bool ok = (s.p == 80 || s.p == 100) && (s.n == 100 || s.n == 200) &&
                  (s.rho == 0.0 || s.rho == 0.5 || s.rho == 1.0);
  if (!ok) {
    throw ConfigError("unknown scenario '" + id +
                      "': p in {80,100}, n in {100,200}, rho in {0,0.5,1}");
  }
  return s;
}

int cmd_reproduce(const ReproduceOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    const Scenario sc = parse_scenario(opts.scenario);
    if (!(opts.scale > 0 && opts.scale <= 1)) throw ConfigError("scale must lie in (0, 1]");
    if (opts.replicates < 1) throw ConfigError("replicates must be >= 1");

    SimConfig config;
    config.p = std::max(2, static_cast<int>(std::lround(sc.p * opts.scale)));
    config.n = sc.n;
    config.K = 3;
    config.M = opts.params.M;
    config.nu = 100;
    config.s = 0.05;
    config.rho = sc.rho;
    config.sigma2 = 0.05;
    config.seed = env_seed().value_or(opts.seed);
    config.validate();

    const std::vector<double> grid = lambda_grid();
    const std::vector<Method> methods{Method::kJfggm, Method::kFglasso};
    std::vector<std::vector<EdgeSet>> truths;
    std::vector<std::vector<std::vector<EdgeSet>>> f_sweeps, j_sweeps;
    for (int r = 0; r < opts.replicates; ++r) {
      SimulatedDataset ds = simulate(config, static_cast<std::uint32_t>(r));
      std::vector<CurvePanel> panels;
      for (auto& g : ds.groups) panels.push_back(std::move(g.panel));
      const JointProblem problem = problem_from_panels(panels, config.M, opts.params.scale);
      const SweepResult res = sweep(problem, methods, grid, opts.params, opts.jobs);
      truths.push_back(ds.truth.full);
      f_sweeps.push_back(sweep_edges(res.fglasso));
      j_sweeps.push_back(sweep_edges(res.jfggm));
      log << "replicate " << r + 1 << "/" << opts.replicates << " done\n";
    }
    const RocCurve jroc = roc_from_sweeps(truths, config.p, j_sweeps, grid);
    const RocCurve froc = roc_from_sweeps(truths, config.p, f_sweeps, grid);

    json summary{{"scenario", {{"p", sc.p}, {"n", sc.n}, {"rho", sc.rho}}},
                 {"scale", opts.scale},
                 {"p_run", config.p},
                 {"jfggm", roc_summary(jroc)},
                 {"fglasso", roc_summary(froc)}};
    std::ostringstream table;
    table << "method,auc\n"
          << "jfggm," << io::format_double(jroc.auc) << "\n"
          << "fglasso," << io::format_double(froc.auc) << "\n";

    json params{{"scenario", opts.scenario},
                {"scale", opts.scale},
                {"replicates", opts.replicates},
                {"simulation", io::sim_config_to_json(config)},
                {"fit", fit_params_to_json(opts.params)}};
    json outputs = write_outputs(opts.out, {{"roc_jfggm.csv", roc_csv(jroc)},
                                            {"roc_fglasso.csv", roc_csv(froc)},
                                            {"auc_table.csv", table.str()},
                                            {"summary.json", io::dump(summary)}});
    io::write_file_atomic(opts.out / "manifest.json",
                          io::dump(manifest("reproduce", params, config.seed, json::object(),
                                            std::move(outputs))));
    log << "scenario (p=" << sc.p << ", n=" << sc.n << ", rho=" << sc.rho << ") run at p="
        << config.p << "\n"
        << "  JFGGM AUC " << jroc.auc << "\n"
        << "  FGGM  AUC " << froc.auc << "\n";
    return kExitOk;
  });
}

}  // namespace jointgraph::cli
