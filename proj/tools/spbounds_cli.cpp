// spbounds: eigenvalue bounds for saddle-point matrices with a singular
// leading block.
//
//   spbounds bound    --A a.mtx --B b.mtx [--gamma g | --auto-gamma] [--json|--csv] [--out dir]
//   spbounds sweep    --A a.mtx --B b.mtx --gamma-min 1e-4 --gamma-max 1e4 --points 25 --out dir
//   spbounds generate --family toy|remark|angles|ipm|random --params '{...}' --seed 1 --out dir
//   spbounds verify   --A a.mtx --B b.mtx [--gamma g]
//
// Exit codes: 0 ok, 1 invariant violation, 2 input error, 3 oracle size cap.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spbounds/spbounds.hpp"

namespace {

using namespace spbounds;

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitInput = 2;
constexpr int kExitSizeCap = 3;

struct ProblemArgs {
  std::string a, b, k;
  std::optional<Index> n;
  std::optional<double> relTol;
  std::optional<double> angleTol;
  std::optional<Index> cap;
  std::string config;
  bool strictPsd = false;
};

void add_problem_options(CLI::App* cmd, ProblemArgs& args) {
  cmd->add_option("--A", args.a, "Matrix Market file holding the leading block A");
  cmd->add_option("--B", args.b, "Matrix Market file holding the constraint block B");
  cmd->add_option("--K", args.k, "Matrix Market file holding the assembled K (instead of --A/--B)");
  cmd->add_option("--n", args.n, "order of A when reading K");
  cmd->add_option("--relTol", args.relTol, "relative rank tolerance (default: max(n+m, 64) machine epsilons)");
  cmd->add_option("--angleTol", args.angleTol, "angles at or below this count as zero");
  cmd->add_option("--cap", args.cap, "largest n+m the dense oracle will solve");
  cmd->add_option("--config", args.config, "JSON run configuration; flags override it");
  cmd->add_flag("--strict-psd", args.strictPsd, "reject slightly negative eigenvalues of A instead of clamping");
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
}

RunConfig make_config(const ProblemArgs& args) {
  RunConfig cfg = args.config.empty() ? RunConfig{} : run_config_from_json(read_json_file(args.config));
  if (args.relTol) cfg.tolerances.relTol = *args.relTol;
  if (args.angleTol) cfg.tolerances.angleTol = *args.angleTol;
  if (args.cap) cfg.oracleCap = *args.cap;
  if (args.strictPsd) cfg.tolerances.strictPsd = true;
  cfg.validate();
  return cfg;
}

struct LoadedProblem {
  SaddleProblem problem;
  Json source;
};

LoadedProblem load(const ProblemArgs& args, const RunConfig& cfg) {
  ProblemFileSet fs;
  Json source;
  if (!args.k.empty()) {
    fs.pathK = args.k;
    fs.splitIndex = args.n;
    source = Json{{"K", args.k}, {"n", args.n ? Json(*args.n) : Json(nullptr)}};
  } else {
    fs.pathA = args.a;
    fs.pathB = args.b;
    source = Json{{"A", args.a}, {"B", args.b}};
  }
  SaddleProblem p = read_problem(fs, cfg);
  return {std::move(p), std::move(source)};
}

Json problem_json(const LoadedProblem& lp) {
  Json j = describe_problem(lp.problem);
  Json out{{"source", lp.source}};
  for (auto& [key, value] : j.items()) out[key] = value;
  return out;
}

void certify_all(RunReport& report, const SaddleProblem& p) {
  if (p.n() + p.m() > report.config.oracleCap) {
    report.notes.push_back("n+m exceeds the oracle cap; bounds are not certified");
    return;
  }
  report.oracle = oracle(p, report.config.oracleCap);
  for (const BoundReport& b : report.bounds) report.certification.push_back(certify(b, *report.oracle, report.config.certSlack));
}

// ---------------------------------------------------------------------------

int run_bound(const ProblemArgs& args, std::optional<double> gamma, bool autoGamma, bool csv,
              const std::string& outDir) {
  RunReport report;
  report.config = make_config(args);
  if (csv) report.config.format = OutputFormat::Csv;
  const LoadedProblem lp = load(args, report.config);
  report.problem = problem_json(lp);

  BoundRequest req;
  req.gamma = gamma;
  req.autoGamma = autoGamma;
  BoundSet set = all_bounds(lp.problem, req);
  report.bounds = std::move(set.reports);
  report.notes = std::move(set.notes);
  certify_all(report, lp.problem);

  if (!outDir.empty()) {
    write_report(outDir, report);
  } else if (report.config.format == OutputFormat::Csv) {
    std::cout << bounds_csv(report);
  } else {
    std::cout << to_json(report).dump(2) << "\n";
  }
  return kExitOk;
}

struct SweepArgs {
  double gammaMin = 1e-4;
  double gammaMax = 1e4;
  std::size_t points = 25;
  unsigned threads = 1;
  std::string out;
};

int run_sweep(const ProblemArgs& args, const SweepArgs& sa, const CLI::App& cmd) {
  RunReport report;
  report.config = make_config(args);
  if (cmd.count("--gamma-min") > 0) report.config.gammaMin = sa.gammaMin;
  if (cmd.count("--gamma-max") > 0) report.config.gammaMax = sa.gammaMax;
  if (cmd.count("--points") > 0) report.config.gammaPoints = sa.points;
  report.config.validate();
  const LoadedProblem lp = load(args, report.config);
  report.problem = problem_json(lp);

  const std::vector<double> grid =
      gamma_grid(report.config.gammaMin, report.config.gammaMax, report.config.gammaPoints);
  report.sweep = gamma_sweep(lp.problem, grid, report.config.oracleCap, sa.threads);
  if (!report.sweep->crossingIndex) report.notes.push_back("1/gamma and mu_min(A_gamma) do not cross on this grid");

  if (!sa.out.empty()) {
    write_report(sa.out, report);
  } else {
    std::cout << sweep_csv(*report.sweep);
  }
  return kExitOk;
}

int run_generate(const std::string& family, const std::string& params, std::uint64_t seed,
                 const std::string& outDir) {
  Json pj;
  try {
    pj = Json::parse(params.empty() ? std::string("{}") : params);
  } catch (const nlohmann::json::exception&) {
    if (!std::filesystem::exists(params)) throw Error(ErrorCode::ParseError, "--params is neither JSON nor a file");
    pj = read_json_file(params);
  }
  GeneratorSpec spec;
  spec.params = params_from_json(family, pj);
  spec.seed = seed;
  const SaddleProblem p = generate(spec);
  write_problem(outDir, p);
  Json j = to_json(spec);
  j["n"] = p.n();
  j["m"] = p.m();
  write_text(std::filesystem::path(outDir) / "spec.json", j.dump(2) + "\n");
  std::cout << "wrote " << (std::filesystem::path(outDir) / "A.mtx").string() << ", B.mtx, spec.json\n";
  return kExitOk;
}

int run_verify(const ProblemArgs& args, std::optional<double> gamma) {
  const RunConfig cfg = make_config(args);
  const LoadedProblem lp = load(args, cfg);
  const std::vector<double> gammas = gamma ? std::vector<double>{*gamma} : std::vector<double>{0.1, 1.0, 10.0};
  bool ok = true;
  for (const InvariantCheck& c : run_invariant_suite(lp.problem, gammas, cfg.oracleCap)) {
    const char* tag = c.skipped ? "SKIP" : (c.passed ? "PASS" : "FAIL");
    std::cout << tag << "  " << c.name << "  " << c.detail << "\n";
    ok = ok && (c.passed || c.skipped);
  }
  std::cout << (ok ? "all invariants hold" : "invariant violation") << "\n";
  return ok ? kExitOk : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Eigenvalue bounds for saddle-point matrices with singular leading blocks"};
  app.require_subcommand(1);

  ProblemArgs boundArgs;
  std::optional<double> boundGamma;
  bool autoGamma = false, asJson = false, asCsv = false;
  std::string boundOut;
  auto* bound = app.add_subcommand("bound", "compute and certify every applicable bound");
  add_problem_options(bound, boundArgs);
  auto* gammaOpt = bound->add_option("--gamma", boundGamma, "augmentation parameter for wbound/agamma");
  auto* autoOpt = bound->add_flag("--auto-gamma", autoGamma, "use the optimal gamma");
  gammaOpt->excludes(autoOpt);
  auto* jsonOpt = bound->add_flag("--json", asJson, "JSON output (default)");
  auto* csvOpt = bound->add_flag("--csv", asCsv, "CSV output");
  jsonOpt->excludes(csvOpt);
  bound->add_option("--out", boundOut, "output directory");

  ProblemArgs sweepArgs;
  SweepArgs sa;
  auto* sweep = app.add_subcommand("sweep", "tabulate the bound against gamma");
  add_problem_options(sweep, sweepArgs);
  sweep->add_option("--gamma-min", sa.gammaMin, "smallest gamma");
  sweep->add_option("--gamma-max", sa.gammaMax, "largest gamma");
  sweep->add_option("--points", sa.points, "number of log-spaced grid points");
  sweep->add_option("--threads", sa.threads, "worker threads for the grid");
  sweep->add_option("--out", sa.out, "output directory");

  std::string family, params, genOut;
  std::uint64_t seed = 0;
  auto* gen = app.add_subcommand("generate", "write a generated problem as Matrix Market files");
  gen->add_option("--family", family, "problem family")
      ->required()
      ->check(CLI::IsMember({"toy", "remark", "angles", "ipm", "random"}));
  gen->add_option("--params", params, "family parameters as JSON (or a JSON file)");
  gen->add_option("--seed", seed, "random seed");
  gen->add_option("--out", genOut, "output directory")->required();

  ProblemArgs verifyArgs;
  std::optional<double> verifyGamma;
  auto* verify = app.add_subcommand("verify", "check every invariant against the dense oracle");
  add_problem_options(verify, verifyArgs);
  verify->add_option("--gamma", verifyGamma, "single gamma for the inverse-identity check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*bound) return run_bound(boundArgs, boundGamma, autoGamma, asCsv, boundOut);
    if (*sweep) return run_sweep(sweepArgs, sa, *sweep);
    if (*gen) return run_generate(family, params, seed, genOut);
    if (*verify) return run_verify(verifyArgs, verifyGamma);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::SizeCapExceeded ? kExitSizeCap : kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
