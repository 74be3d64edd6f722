// revpref: decide rationalizability of consumer-choice data, construct the
// rationalizing utilities, and exhibit the transport-side equivalences.
//
// Subcommands: check, utility, transport, generate, fields. Exit codes:
// 0 satisfied, 1 negative verdict, 2 input or usage error.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "revpref/fields.hpp"
#include "revpref/io.hpp"
#include "revpref/rationality.hpp"
#include "revpref/transport.hpp"
#include "revpref/utility.hpp"

using nlohmann::json;
using namespace revpref;

namespace {

constexpr std::uint64_t kDefaultSeed = 2024;

struct CommonOptions {
  double tolerance = kDefaultTolerance;
  std::string format = "text";
  std::uint64_t seed = kDefaultSeed;
  bool tolerance_given = false;
};

// Machine reports carry 12 significant digits, human reports 6.
double round_sig(double v, int digits = 12) {
  if (v == 0.0 || !std::isfinite(v)) return v;
  const double mag =
      std::pow(10.0, digits - 1 - std::floor(std::log10(std::fabs(v))));
  return std::round(v * mag) / mag;
}

std::string fmt(double v, int digits = 6) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

json round_vector(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(round_sig(x));
  return out;
}

double env_default_tolerance() {
  if (const char* env = std::getenv("REVPREF_TOLERANCE")) {
    try {
      std::size_t used = 0;
      const double v = std::stod(env, &used);
      if (used != std::string(env).size() || !(v >= 0.0)) {
        throw std::invalid_argument(env);
      }
      return v;
    } catch (const std::exception&) {
      throw InputError(std::string("REVPREF_TOLERANCE is not a valid "
                                   "nonnegative number: '") +
                       env + "'");
    }
  }
  return kDefaultTolerance;
}

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--tolerance", opts.tolerance,
                  "violation tolerance (default 1e-9; env REVPREF_TOLERANCE "
                  "overrides the default)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--format", opts.format, "report format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  cmd->add_option("--seed", opts.seed, "seed for every randomized step")
      ->capture_default_str();
}

void emit(const json& report, const CommonOptions& opts,
          const std::string& text) {
  if (opts.format == "json") {
    std::cout << report.dump(2) << "\n";
  } else {
    std::cout << text;
  }
}

json verdict_json(const Verdict& v, const std::vector<std::string>& ids) {
  json out;
  out["rationalizable"] = v.rationalizable;
  if (!v.rationalizable) {
    json witness;
    witness["cycle_indices"] = v.cycle;
    json cycle_ids = json::array();
    for (int i : v.cycle) cycle_ids.push_back(ids[static_cast<std::size_t>(i)]);
    witness["cycle_ids"] = std::move(cycle_ids);
    witness["cycle_sum"] = round_sig(v.cycle_sum);
    out["witness"] = std::move(witness);
  }
  return out;
}

std::string verdict_text(const Verdict& v, const std::vector<std::string>& ids) {
  if (v.rationalizable) return "  verdict: rationalizable\n";
  std::string out = "  verdict: VIOLATED\n  witness cycle:";
  for (int i : v.cycle) {
    out += " " + ids[static_cast<std::size_t>(i)] + "(#" + std::to_string(i) +
           ")";
  }
  out += "\n  cycle sum: " + fmt(v.cycle_sum) + "\n";
  return out;
}

// ---------------------------------------------------------------- check ---

struct CheckResult {
  json report;
  std::string text;
  int exit_code = 0;
};

CheckResult check_one_file(const std::string& path, const std::string& method,
                           const CommonOptions& opts) {
  CheckResult result;
  result.report["file"] = path;
  try {
    const NamedDataset named = parse_dataset(path);
    Verdict v;
    if (method == "garp") {
      v = check_garp(named.data, opts.tolerance);
    } else if (method == "brute-force") {
      v = brute_force_cycle_check(named.data, Kernel::standard_inner(),
                                  opts.tolerance);
    } else {
      v = check_harp(named.data, Kernel::standard_inner(), opts.tolerance);
    }
    result.report["n"] = named.data.size();
    result.report["dimension"] = named.data.dimension();
    result.report.update(verdict_json(v, named.ids));
    result.text = path + " (" + method + ", n=" +
                  std::to_string(named.data.size()) + ")\n" +
                  verdict_text(v, named.ids);
    if (method == "harp" && v.rationalizable && named.data.size() >= 2) {
      // Minimum simple-cycle sum: shortest path i -> j closed by the edge
      // j -> i (exact once no negative cycle exists). A value near zero
      // means the verdict sits on the equality boundary, e.g. duplicated
      // observations.
      const CrossLogMatrix a = CrossLogMatrix::build(named.data);
      const Closure closure = floyd_warshall(a);
      double min_cycle = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < closure.n; ++i) {
        for (std::size_t j = 0; j < closure.n; ++j) {
          if (i != j) {
            min_cycle = std::min(min_cycle, closure.at(i, j) + a.at(j, i));
          }
        }
      }
      result.report["min_cycle_sum"] = round_sig(min_cycle);
      if (min_cycle <= opts.tolerance) {
        result.report["boundary"] = true;
        result.text += "  note: minimal cycle sum " + fmt(min_cycle) +
                       " lies on the zero boundary\n";
      }
    }
    result.exit_code = v.rationalizable ? 0 : 1;
  } catch (const InputError& e) {
    result.report["error"] = e.what();
    result.text = path + "\n  error: " + std::string(e.what()) + "\n";
    result.exit_code = 2;
  }
  return result;
}

int run_check(const std::vector<std::string>& files, const std::string& method,
              const std::string& out_dir, int jobs, const CommonOptions& opts) {
  std::vector<CheckResult> results(files.size());
  const int workers =
      std::max(1, std::min<int>(jobs, static_cast<int>(files.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < files.size(); ++i) {
      results[i] = check_one_file(files[i], method, opts);
    }
  } else {
    std::vector<std::thread> pool;
    std::size_t cursor = 0;
    std::mutex gate;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (;;) {
          std::size_t mine;
          {
            std::lock_guard<std::mutex> lock(gate);
            if (cursor >= files.size()) return;
            mine = cursor++;
          }
          results[mine] = check_one_file(files[mine], method, opts);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }

  json report;
  report["command"] = "check";
  report["method"] = method;
  report["tolerance"] = opts.tolerance;
  report["reports"] = json::array();
  std::string text;
  int exit_code = 0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    report["reports"].push_back(results[i].report);
    text += results[i].text;
    exit_code = std::max(exit_code, results[i].exit_code);
    if (!out_dir.empty()) {
      json per_file;
      per_file["command"] = "check";
      per_file["method"] = method;
      per_file["tolerance"] = opts.tolerance;
      per_file.update(results[i].report);
      const std::filesystem::path stem =
          std::filesystem::path(files[i]).stem();
      write_text_atomic(
          (std::filesystem::path(out_dir) / (stem.string() + ".report.json"))
              .string(),
          per_file.dump(2) + "\n");
    }
  }
  emit(report, opts, text);
  return exit_code;
}

// -------------------------------------------------------------- utility ---

int run_utility(const std::string& path, bool afriat, std::size_t samples,
                const CommonOptions& opts) {
  const NamedDataset named = parse_dataset(path);
  json report;
  report["command"] = "utility";
  report["file"] = path;
  report["method"] = afriat ? "afriat" : "homogeneous";
  report["tolerance"] = opts.tolerance;
  report["seed"] = opts.seed;
  report["verify_samples"] = samples;

  if (afriat) {
    const AfriatSolveResult solved = afriat_solve(named.data, opts.tolerance);
    if (!solved.feasible) {
      const Verdict garp = check_garp(named.data, opts.tolerance);
      report["feasible"] = false;
      report["phase1_objective"] = round_sig(solved.phase1_objective);
      report.update(verdict_json(garp, named.ids));
      emit(report, opts,
           path + " (afriat)\n  infeasible: phase-1 objective " +
               fmt(solved.phase1_objective) + "\n" +
               verdict_text(garp, named.ids));
      return 1;
    }
    const AfriatSolution& sol = *solved.solution;
    const AfriatUtility model(named.data, sol);
    const VerificationReport verify =
        verify_rationalization(model, samples, opts.tolerance, opts.seed);
    report["feasible"] = true;
    report["levels"] = round_vector(sol.levels);
    report["multipliers"] = round_vector(sol.multipliers);
    report["max_residual"] = round_sig(sol.max_violation(named.data));
    report["note"] =
        "the Afriat system admits many feasible points; this is the first "
        "basic point the simplex reaches";
    json values = json::array();
    for (std::size_t i = 0; i < named.data.size(); ++i) {
      values.push_back(round_sig(model.value(named.data[i].bundle)));
    }
    report["utility_at_data"] = std::move(values);
    report["verification"] = {
        {"passed", verify.passed},
        {"max_violation", round_sig(verify.max_violation)},
        {"samples_per_observation", verify.samples_per_observation}};
    report["superdifferential"] =
        check_superdifferential(model, samples, opts.tolerance, opts.seed);

    std::string text = path + " (afriat)\n  feasible: yes\n";
    for (std::size_t i = 0; i < named.data.size(); ++i) {
      text += "  " + named.ids[i] + ": y=" + fmt(sol.levels[i]) +
              " s=" + fmt(sol.multipliers[i]) +
              " u(X)=" + fmt(model.value(named.data[i].bundle)) + "\n";
    }
    text += "  max residual: " + fmt(sol.max_violation(named.data)) + "\n";
    text += std::string("  verification: ") +
            (verify.passed ? "passed" : "FAILED") +
            " (max violation " + fmt(verify.max_violation) + ")\n";
    emit(report, opts, text);
    return verify.passed ? 0 : 1;
  }

  try {
    const HomogeneousUtility model =
        HomogeneousUtility::build(named.data, Kernel::standard_inner(),
                                  opts.tolerance);
    const VerificationReport verify =
        verify_rationalization(model, samples, opts.tolerance, opts.seed);
    report["potentials"] = round_vector(model.potentials());
    report["normalizers"] = round_vector(model.normalizers());
    json values = json::array();
    for (std::size_t i = 0; i < named.data.size(); ++i) {
      values.push_back(round_sig(model.value(named.data[i].bundle)));
    }
    report["utility_at_data"] = std::move(values);
    report["verification"] = {
        {"passed", verify.passed},
        {"max_violation", round_sig(verify.max_violation)},
        {"samples_per_observation", verify.samples_per_observation}};
    report["superdifferential"] =
        check_superdifferential(model, samples, opts.tolerance, opts.seed);

    std::string text = path + " (homogeneous)\n";
    for (std::size_t i = 0; i < named.data.size(); ++i) {
      text += "  " + named.ids[i] + ": v=" + fmt(model.potentials()[i]) +
              " u(X)=" + fmt(model.value(named.data[i].bundle)) + "\n";
    }
    text += std::string("  verification: ") +
            (verify.passed ? "passed" : "FAILED") + " (max violation " +
            fmt(verify.max_violation) + ", " + std::to_string(samples) +
            " samples/observation)\n";
    emit(report, opts, text);
    return verify.passed ? 0 : 1;
  } catch (const HarpViolationError& e) {
    report.update(verdict_json(e.verdict, named.ids));
    emit(report, opts,
         path + " (homogeneous)\n" + verdict_text(e.verdict, named.ids));
    return 1;
  }
}

// ------------------------------------------------------------ transport ---

json duals_json(const DualPotentials& duals, const Coupling& plan,
                const TransportInstance& inst) {
  json out;
  out["phi"] = round_vector(duals.phi);
  out["psi"] = round_vector(duals.psi);
  out["dual_value"] = round_sig(duals.dual_value(inst));
  out["max_dual_infeasibility"] = round_sig(duals.max_infeasibility(inst));
  out["max_slackness_gap"] = round_sig(duals.max_slackness_gap(plan, inst));
  return out;
}

int run_transport(const std::string& path, bool solve_mode,
                  const CommonOptions& opts) {
  json report;
  report["command"] = "transport";
  report["file"] = path;
  report["tolerance"] = opts.tolerance;

  const std::string content = read_file(path);
  const bool is_instance =
      infer_format(path) == FileFormat::Json && looks_like_instance(content);

  if (!solve_mode) {
    if (is_instance) {
      throw InputError(
          "--diagonal-check needs a dataset file (the diagonal pairing is "
          "defined by observations)");
    }
    const NamedDataset named = parse_dataset_text(
        content, infer_format(path), path);
    const std::size_t n = named.data.size();
    Matrix c(n, n);
    double identity_value = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        c.at(i, j) = log_cost(named.data[i].bundle, named.data[j].prices);
      }
      identity_value += c.at(i, i);
    }
    const Assignment best = solve_assignment(c);
    const bool diagonal_optimal =
        identity_value <= best.value + opts.tolerance;
    const TransportInstance inst = TransportInstance::from_dataset(named.data);
    const OtSolution sol = solve_discrete_ot(inst);
    const double residual =
        cost_decomposition_check(diagonal_coupling(inst), inst);

    report["method"] = "diagonal-check";
    report["identity_value"] = round_sig(identity_value);
    report["optimal_value"] = round_sig(best.value);
    report["optimal_permutation"] = best.row_to_col;
    report["diagonal_optimal"] = diagonal_optimal;
    report["cost_decomposition_residual"] = round_sig(residual);
    report["duals"] = duals_json(sol.duals, sol.coupling, inst);

    std::string text = path + " (diagonal-check, n=" + std::to_string(n) +
                       ")\n  identity value: " + fmt(identity_value) +
                       "\n  optimal value:  " + fmt(best.value) +
                       "\n  optimal permutation:";
    for (int j : best.row_to_col) text += " " + std::to_string(j);
    text += std::string("\n  diagonal optimal: ") +
            (diagonal_optimal ? "yes" : "NO") +
            "\n  cost-decomposition residual: " + fmt(residual) + "\n";
    emit(report, opts, text);
    return diagonal_optimal ? 0 : 1;
  }

  const TransportInstance inst =
      is_instance ? parse_instance_text(content, path)
                  : TransportInstance::from_dataset(
                        parse_dataset_text(content, infer_format(path), path)
                            .data);
  const OtSolution sol = solve_discrete_ot(inst);
  const double residual = cost_decomposition_check(sol.coupling, inst);

  report["method"] = "solve";
  report["sources"] = inst.sources.size();
  report["targets"] = inst.targets.size();
  report["optimal_value"] = round_sig(sol.coupling.value);
  json cells = json::array();
  for (std::size_t i = 0; i < sol.coupling.plan.rows; ++i) {
    for (std::size_t j = 0; j < sol.coupling.plan.cols; ++j) {
      const double mass = sol.coupling.plan.at(i, j);
      if (mass > 1e-12) {
        cells.push_back({{"source", i}, {"target", j}, {"mass", round_sig(mass)}});
      }
    }
  }
  report["plan"] = std::move(cells);
  report["max_marginal_error"] =
      round_sig(sol.coupling.max_marginal_error(inst));
  report["cost_decomposition_residual"] = round_sig(residual);
  report["duals"] = duals_json(sol.duals, sol.coupling, inst);

  std::string text = path + " (solve, " + std::to_string(inst.sources.size()) +
                     "x" + std::to_string(inst.targets.size()) +
                     ")\n  optimal value: " + fmt(sol.coupling.value) + "\n";
  for (const json& cell : report["plan"]) {
    text += "  plan[" + std::to_string(cell["source"].get<std::size_t>()) +
            "," + std::to_string(cell["target"].get<std::size_t>()) +
            "] = " + fmt(cell["mass"].get<double>()) + "\n";
  }
  text += "  cost-decomposition residual: " + fmt(residual) + "\n";
  emit(report, opts, text);
  return 0;
}

// ------------------------------------------------------------- generate ---

int run_generate(const std::string& family, std::size_t n, std::size_t m,
                 std::vector<double> alpha, double rho,
                 std::vector<double> weights, double strength,
                 const std::string& input, const std::string& out,
                 SampleRange price_range, SampleRange income_range,
                 const CommonOptions& opts) {
  NamedDataset named{Dataset::from_pairs({{{1.0}, {1.0}}}), {"0"}};
  if (family == "cobb-douglas") {
    if (alpha.empty()) {
      alpha.assign(m, 1.0 / static_cast<double>(m));
    }
    named.data = gen_cobb_douglas(n, m, alpha, price_range, income_range,
                                  opts.seed);
  } else if (family == "ces") {
    if (weights.empty()) weights.assign(m, 1.0);
    named.data =
        gen_ces(n, m, rho, weights, price_range, income_range, opts.seed);
  } else {  // inject-violation
    if (input.empty()) {
      throw InputError("--inject-violation needs --input <dataset>");
    }
    const NamedDataset base = parse_dataset(input);
    named.data = inject_violation(base.data, strength, opts.seed);
    named.ids = base.ids;
  }
  if (named.ids.size() != named.data.size()) {
    named.ids.clear();
    for (std::size_t i = 0; i < named.data.size(); ++i) {
      named.ids.push_back("o" + std::to_string(i));
    }
  }
  if (out.empty()) throw InputError("generate needs --out <file>");
  const std::string text = serialize_dataset(named, infer_format(out));
  write_text_atomic(out, text);

  json report;
  report["command"] = "generate";
  report["family"] = family;
  report["n"] = named.data.size();
  report["dimension"] = named.data.dimension();
  report["seed"] = opts.seed;
  report["out"] = out;
  emit(report, opts,
       "wrote " + out + " (" + family + ", n=" +
           std::to_string(named.data.size()) + ", seed=" +
           std::to_string(opts.seed) + ")\n");
  return 0;
}

// --------------------------------------------------------------- fields ---

int run_fields(bool inverse_demand, const std::string& field_name,
               std::vector<double> alpha, std::size_t loop_count,
               std::vector<std::size_t> n_values, double threshold,
               std::size_t point_count, const CommonOptions& opts) {
  if (alpha.empty()) alpha = {0.5, 0.5};
  const std::size_t m = alpha.size();
  json report;
  report["command"] = "fields";
  report["seed"] = opts.seed;
  report["alpha"] = alpha;

  if (inverse_demand) {
    if (field_name != "cobb-douglas") {
      throw InputError(
          "--inverse-demand needs the cobb-douglas field (the reference "
          "gradient comes from its utility)");
    }
    const double tol = opts.tolerance_given ? opts.tolerance : 1e-8;
    const SmoothDemandField field = SmoothDemandField::cobb_douglas(alpha);
    const auto grad = [&alpha](const Bundle& x) {
      std::vector<double> g(alpha.size());
      for (std::size_t k = 0; k < alpha.size(); ++k) g[k] = alpha[k] / x[k];
      return g;
    };
    const std::vector<double> coords = revpref::detail::sample_log_uniform(
        opts.seed, 0, point_count, m, 0.1, 10.0);
    std::vector<Bundle> points;
    for (std::size_t s = 0; s < point_count; ++s) {
      points.push_back(Bundle(std::vector<double>(
          coords.begin() + s * m, coords.begin() + (s + 1) * m)));
    }
    const InverseDemandReport r = check_inverse_demand(grad, field, points, tol);
    report["method"] = "inverse-demand";
    report["tolerance"] = tol;
    report["points"] = r.points;
    report["max_residual"] = round_sig(r.max_residual);
    report["passed"] = r.passed;
    emit(report, opts,
         std::string("inverse-demand (cobb-douglas)\n  points: ") +
             std::to_string(r.points) + "\n  max residual: " +
             fmt(r.max_residual) + "\n  " +
             (r.passed ? "PASS" : "FAIL") + "\n");
    return r.passed ? 0 : 1;
  }

  const SmoothDemandField field = field_name == "twisted"
                                      ? SmoothDemandField::twisted()
                                      : SmoothDemandField::cobb_douglas(alpha);
  if (m < 2) throw InputError("path integrals need dimension >= 2");
  std::vector<ClosedPath> loops;
  loops.push_back(ClosedPath::circle(std::vector<double>(m, 2.0), 0, 1, 0.3));
  if (loop_count > 1) {
    std::vector<double> center(m, 2.0);
    center[0] = 3.0;
    center[1] = 1.5;
    loops.push_back(ClosedPath::ellipse(center, 0, 1, 0.8, 0.4));
  }
  if (loop_count > 2) {
    std::vector<double> center(m, 2.0);
    center[0] = 1.2;
    center[1] = 2.5;
    loops.push_back(ClosedPath::ellipse(center, 0, 1, 0.5, 1.1, 0.7));
  }
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> c_dist(1.5, 3.0), r_dist(0.2, 0.5);
  while (loops.size() < loop_count) {
    std::vector<double> center(m, 2.0);
    center[0] = c_dist(rng);
    center[1] = c_dist(rng);
    loops.push_back(ClosedPath::ellipse(center, 0, 1, r_dist(rng), r_dist(rng),
                                        c_dist(rng)));
  }
  if (n_values.empty()) n_values = {100, 1000};
  const PotentialityReport r =
      potentiality_check(field, loops, log_inner_cost(), n_values, threshold);
  report["method"] = "path-integral";
  report["field"] = field_name;
  report["threshold"] = threshold;
  report["paths"] = json::array();
  std::string text = "path-integral (" + field_name + ")\n";
  for (const PathDecay& d : r.paths) {
    json p;
    p["path"] = d.path_tag;
    p["n_values"] = d.n_values;
    p["sums"] = round_vector(d.sums);
    p["decays"] = d.decays;
    p["small_at_finest"] = d.small_at_finest;
    report["paths"].push_back(std::move(p));
    text += "  " + d.path_tag + ":";
    for (std::size_t t = 0; t < d.sums.size(); ++t) {
      text += " |S(" + std::to_string(d.n_values[t]) + ")|=" +
              fmt(std::fabs(d.sums[t]));
    }
    text += d.decays && d.small_at_finest ? "  ok\n" : "  VIOLATES\n";
  }
  report["passed"] = r.passed;
  text += r.passed ? "  PASS\n" : "  FAIL\n";
  emit(report, opts, text);
  return r.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "revpref: rationalizability checks, utility construction, and the "
      "equivalent discrete transport problems for consumer-choice data"};
  app.require_subcommand(1);

  CommonOptions opts;
  try {
    opts.tolerance = env_default_tolerance();
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  // check
  std::vector<std::string> check_files;
  std::string check_out_dir;
  int jobs = 1;
  bool flag_harp = false, flag_garp = false, flag_brute = false;
  CLI::App* check = app.add_subcommand(
      "check", "decide rationalizability of one or more dataset files");
  check->add_option("files", check_files, "dataset files (csv or json)")
      ->required()
      ->expected(-1);
  check->add_flag("--harp", flag_harp, "homogeneous axiom (default)");
  check->add_flag("--garp", flag_garp, "generalized axiom");
  check->add_flag("--brute-force", flag_brute,
                  "exhaustive cycle oracle (n <= 8)");
  check->add_option("--out-dir", check_out_dir,
                    "write one JSON report per input file");
  check->add_option("--jobs", jobs, "process files concurrently")
      ->check(CLI::PositiveNumber);
  CommonOptions check_opts = opts;
  add_common(check, check_opts);

  // utility
  std::string utility_file;
  bool flag_homogeneous = false, flag_afriat = false;
  std::size_t verify_samples = 1000;
  CLI::App* utility =
      app.add_subcommand("utility", "construct and verify a rationalizing "
                                    "utility");
  utility->add_option("file", utility_file, "dataset file")->required();
  utility->add_flag("--homogeneous", flag_homogeneous,
                    "min-of-linear homogeneous form (default)");
  utility->add_flag("--afriat", flag_afriat, "Afriat levels and multipliers");
  utility->add_option("--verify-samples", verify_samples,
                      "random bundles per observation")
      ->capture_default_str();
  CommonOptions utility_opts = opts;
  add_common(utility, utility_opts);

  // transport
  std::string transport_file;
  bool flag_diagonal = false, flag_solve = false;
  CLI::App* transport = app.add_subcommand(
      "transport", "discrete Monge-Kantorovich problems for the data");
  transport->add_option("file", transport_file,
                        "dataset file or transport-instance json")
      ->required();
  transport->add_flag("--diagonal-check", flag_diagonal,
                      "is the diagonal coupling optimal? (default)");
  transport->add_flag("--solve", flag_solve, "solve and print the plan");
  CommonOptions transport_opts = opts;
  add_common(transport, transport_opts);

  // generate
  bool flag_cd = false, flag_ces = false, flag_inject = false;
  std::size_t gen_n = 8, gen_m = 2;
  std::vector<double> gen_alpha, gen_weights;
  double gen_rho = 0.5, gen_strength = 1.0;
  std::string gen_input, gen_out;
  SampleRange price_range{0.5, 2.0}, income_range{1.0, 10.0};
  CLI::App* generate =
      app.add_subcommand("generate", "write synthetic dataset files");
  generate->add_flag("--cobb-douglas", flag_cd, "Cobb-Douglas demand (default)");
  generate->add_flag("--ces", flag_ces, "CES demand");
  generate->add_flag("--inject-violation", flag_inject,
                     "perturb --input into a HARP violation");
  generate->add_option("-n,--observations", gen_n, "observations")
      ->capture_default_str();
  generate->add_option("-m,--goods", gen_m, "goods")->capture_default_str();
  generate->add_option("--alpha", gen_alpha,
                       "Cobb-Douglas exponents (default uniform)");
  generate->add_option("--rho", gen_rho, "CES substitution parameter")
      ->capture_default_str();
  generate->add_option("--weights", gen_weights, "CES weights (default 1)");
  generate->add_option("--strength", gen_strength,
                       "violation strength in [0,1]")
      ->capture_default_str();
  generate->add_option("--input", gen_input, "base dataset for injection");
  generate->add_option("--out", gen_out, "output file (csv or json)")
      ->required();
  generate->add_option("--price-lo", price_range.lo, "price range low")
      ->capture_default_str();
  generate->add_option("--price-hi", price_range.hi, "price range high")
      ->capture_default_str();
  generate->add_option("--income-lo", income_range.lo, "income range low")
      ->capture_default_str();
  generate->add_option("--income-hi", income_range.hi, "income range high")
      ->capture_default_str();
  CommonOptions generate_opts = opts;
  add_common(generate, generate_opts);

  // fields
  bool flag_path = false, flag_inverse = false;
  std::string field_name = "cobb-douglas";
  std::vector<double> fields_alpha;
  std::size_t loop_count = 3, point_count = 50;
  std::vector<std::size_t> fields_n;
  double fields_threshold = 5e-3;
  CLI::App* fields = app.add_subcommand(
      "fields", "discretized path integrals and the inverse-demand relation");
  fields->add_flag("--path-integral", flag_path,
                   "closed-path decay check (default)");
  fields->add_flag("--inverse-demand", flag_inverse,
                   "p(x)/<x,p(x)> against the utility gradient");
  fields->add_option("--field", field_name, "demand field")
      ->check(CLI::IsMember({"cobb-douglas", "twisted"}))
      ->capture_default_str();
  fields->add_option("--alpha", fields_alpha,
                     "Cobb-Douglas exponents (default 0.5 0.5)");
  fields->add_option("--loops", loop_count, "number of closed loops")
      ->capture_default_str();
  fields->add_option("--N", fields_n, "discretization ladder (default 100 1000)");
  fields->add_option("--threshold", fields_threshold,
                     "pass threshold on |sum| at the finest N")
      ->capture_default_str();
  fields->add_option("--points", point_count, "inverse-demand sample points")
      ->capture_default_str();
  CommonOptions fields_opts = opts;
  add_common(fields, fields_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
        e.get_name() == "CallForVersion") {
      return app.exit(e);
    }
    app.exit(e);
    return 2;
  }

  try {
    if (check->parsed()) {
      if (flag_garp + flag_brute + flag_harp > 1) {
        throw InputError("choose one of --harp, --garp, --brute-force");
      }
      check_opts.tolerance_given = check->count("--tolerance") > 0;
      const std::string method =
          flag_garp ? "garp" : flag_brute ? "brute-force" : "harp";
      return run_check(check_files, method, check_out_dir, jobs, check_opts);
    }
    if (utility->parsed()) {
      if (flag_homogeneous && flag_afriat) {
        throw InputError("choose one of --homogeneous, --afriat");
      }
      utility_opts.tolerance_given = utility->count("--tolerance") > 0;
      return run_utility(utility_file, flag_afriat, verify_samples,
                         utility_opts);
    }
    if (transport->parsed()) {
      if (flag_diagonal && flag_solve) {
        throw InputError("choose one of --diagonal-check, --solve");
      }
      transport_opts.tolerance_given = transport->count("--tolerance") > 0;
      return run_transport(transport_file, flag_solve, transport_opts);
    }
    if (generate->parsed()) {
      if (flag_cd + flag_ces + flag_inject > 1) {
        throw InputError(
            "choose one of --cobb-douglas, --ces, --inject-violation");
      }
      generate_opts.tolerance_given = generate->count("--tolerance") > 0;
      const std::string family =
          flag_ces ? "ces" : flag_inject ? "inject-violation" : "cobb-douglas";
      return run_generate(family, gen_n, gen_m, gen_alpha, gen_rho, gen_weights,
                          gen_strength, gen_input, gen_out, price_range,
                          income_range, generate_opts);
    }
    if (fields->parsed()) {
      if (flag_path && flag_inverse) {
        throw InputError("choose one of --path-integral, --inverse-demand");
      }
      fields_opts.tolerance_given = fields->count("--tolerance") > 0;
      return run_fields(flag_inverse, field_name, fields_alpha, loop_count,
                        fields_n, fields_threshold, point_count, fields_opts);
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
