#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "passk/allocation.hpp"
#include "passk/distribution_fit.hpp"
#include "passk/error.hpp"
#include "passk/estimators.hpp"
#include "passk/evaluation.hpp"
#include "passk/records.hpp"
#include "passk/regression.hpp"
#include "passk/serialize.hpp"
#include "passk/synthetic.hpp"

namespace passk::cli {
namespace {

// Bad flag values found after CLI11 has accepted the command line.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::int64_t parse_int(std::string_view text) {
  std::int64_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw std::invalid_argument("not an integer: \"" + std::string(text) + "\"");
  return value;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

RecordMode detect_mode(const std::string& text, const std::string& requested) {
  if (requested == "outcomes") return RecordMode::outcomes;
  if (requested == "counts") return RecordMode::counts;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    return line.find("\"outcomes\"") != std::string::npos ? RecordMode::outcomes : RecordMode::counts;
  }
  return RecordMode::counts;
}

CountsState load_counts(const std::string& path, const std::string& mode) {
  const auto text = read_file(path);
  std::istringstream in(text);
  if (detect_mode(text, mode) == RecordMode::outcomes) return full_counts(parse_outcomes(in));
  return parse_counts(in);
}

PoolSet load_pools(const std::string& path) {
  std::istringstream in(read_file(path));
  return parse_outcomes(in);
}

SyntheticConfig load_spec(const std::string& path) { return parse_synthetic_config(read_file(path)); }

Fitter require_fitter(const std::string& tag) {
  auto fitter = parse_fitter(tag);
  if (!fitter) throw UsageError("unknown method \"" + tag + "\"");
  return *fitter;
}

std::vector<Method> parse_methods(const std::string& text) {
  if (text == "all") return all_methods();
  std::vector<Method> methods;
  std::istringstream in(text);
  std::string tag;
  while (std::getline(in, tag, ',')) {
    auto m = parse_method(tag);
    if (!m) throw UsageError("unknown method \"" + tag + "\"");
    methods.push_back(*m);
  }
  if (methods.empty()) throw UsageError("--methods is empty");
  return methods;
}

std::vector<std::int64_t> checked_grid(const std::string& text, const char* flag) {
  try {
    return parse_k_grid(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

std::string emit(const std::string& out_path, const std::string& contents, std::ostream& out) {
  if (out_path.empty() || out_path == "-") {
    out << contents;
    return "stdout";
  }
  write_atomic(out_path, contents);
  return out_path;
}

struct Shared {
  std::string input;
  std::string spec;
  std::string mode = "auto";
  std::string out;
  std::uint64_t seed = 0;
};

// --- subcommands -----------------------------------------------------------

int run_validate(const Shared& o, const Provenance& prov, std::ostream& out, std::ostream& err) {
  const auto text = read_file(o.input);
  std::istringstream in(text);
  const auto report = validate_records(in, detect_mode(text, o.mode));
  std::string where = "stdout";
  if (!o.out.empty()) where = emit(o.out, to_json(report, prov), out);
  for (const auto& v : report.violations) err << "passk: " << v << "\n";
  out << "validate: " << report.problems << " problems, attempts " << report.min_attempts << ".."
      << report.max_attempts << ", " << report.zero_success_problems << " with zero successes, "
      << report.violations.size() << " violations";
  if (!o.out.empty()) out << " -> " << where;
  out << "\n";
  return report.ok() ? kExitOk : kExitFailure;
}

struct FitArgs {
  std::string method = "beta-binomial";
  int bins = BinOptions{}.count;
  double bin_ratio = BinOptions{}.ratio;
};

int run_fit(const Shared& o, const FitArgs& a, const Provenance& prov, std::ostream& out) {
  const auto fitter = require_fitter(a.method);
  const auto counts = load_counts(o.input, o.mode);
  FitOptions options;
  options.seed = o.seed;
  std::string summary;
  std::string text;
  if (fitter == Fitter::loglog_regression) {
    const auto fit = fit_regression_baseline(counts);
    text = to_json(fit, prov);
    summary = "slope=" + format_double(fit.slope) + " intercept=" + format_double(fit.intercept);
  } else {
    const auto fit = fitter == Fitter::beta_binomial
                         ? fit_beta_binomial(counts, options)
                         : fit_discretized_beta(counts, BinOptions{a.bins, a.bin_ratio}, options);
    text = to_json(fit, prov);
    summary = "alpha=" + format_double(fit.alpha) + " beta=" + format_double(fit.beta);
    if (fit.theta != 1.0) summary += " theta=" + format_double(fit.theta);
    if (!fit.converged) summary += " (not converged)";
    if (fit.boundary_hit) summary += " (at bound)";
  }
  const auto where = emit(o.out, text, out);
  if (where != "stdout") out << "fit: " << a.method << " " << summary << " on " << counts.size() << " problems -> "
                             << where << "\n";
  return kExitOk;
}

struct PredictArgs {
  std::string fit;
  std::string method = "beta-binomial";
  std::string ks;
  std::int64_t k = 0;
  int resamples = BootstrapOptions{}.resamples;
  double level = BootstrapOptions{}.level;
};

int run_predict(const Shared& o, const PredictArgs& a, const Provenance& prov, std::ostream& out) {
  if (a.fit.empty() == o.input.empty()) throw UsageError("predict needs exactly one of --fit or --input");
  if (!a.fit.empty()) {
    if (a.ks.empty()) throw UsageError("predict --fit needs --ks");
    const auto ks = checked_grid(a.ks, "--ks");
    const auto text = read_file(a.fit);
    PassCurve curve;
    curve.method = fit_method_from_json(text);
    curve.seed = o.seed;
    if (curve.method == "loglog-regression") {
      const auto fit = power_law_fit_from_json(text);
      for (auto k : ks) curve.points.push_back({k, predict_power_law(fit, k)});
    } else {
      const auto fit = beta_params_from_json(text);
      for (auto k : ks) curve.points.push_back({k, predict_pass_at_k(fit, k)});
    }
    const auto where = emit(o.out, to_json(curve, prov), out);
    if (where != "stdout") {
      out << "predict: " << curve.method << " at " << ks.size() << " k values, pass@" << ks.back() << "="
          << format_double(curve.points.back().value) << " -> " << where << "\n";
    }
    return kExitOk;
  }
  if (a.k < 1) throw UsageError("predict --input needs --k >= 1");
  if (a.resamples < 1) throw UsageError("--resamples must be >= 1");
  if (!(a.level > 0.0 && a.level < 1.0)) throw UsageError("--level must lie in (0, 1)");
  const auto fitter = require_fitter(a.method);
  const auto counts = load_counts(o.input, o.mode);
  Rng rng(derive_seed(o.seed, "bootstrap"));
  BootstrapOptions options;
  options.resamples = a.resamples;
  options.level = a.level;
  FitSettings settings;
  settings.fit.seed = o.seed;
  const auto ci = bootstrap_ci(counts, fitter, a.k, options, rng, settings);
  const auto where = emit(o.out, to_json(ci, prov), out);
  if (where != "stdout") {
    out << "predict: " << a.method << " pass@" << a.k << "=" << format_double(ci.point) << " ["
        << format_double(ci.lower) << ", " << format_double(ci.upper) << "] -> " << where << "\n";
  }
  return kExitOk;
}

struct AllocateArgs {
  std::int64_t k = 1;
  double budget = 0.0;
  std::size_t problems = 0;
  bool fractional = false;
};

int run_allocate(const Shared& o, const AllocateArgs& a, const Provenance& prov, std::ostream& out) {
  if (o.spec.empty() == o.input.empty()) throw UsageError("allocate needs exactly one of --spec or --input");
  if (a.k < 1) throw UsageError("--k must be >= 1");
  if (!(a.budget > 0.0)) throw UsageError("--budget must be positive");
  std::vector<double> p;
  std::vector<std::string> ids;
  if (!o.spec.empty()) {
    const auto cfg = load_spec(o.spec);
    const std::size_t m = a.problems ? a.problems : cfg.problems.value_or(100);
    Rng rng(derive_seed(o.seed, "difficulties"));
    p = sample_difficulties(cfg.spec, m, rng);
    for (std::size_t i = 0; i < m; ++i) ids.push_back("p" + std::to_string(i));
  } else {
    // Plug-in difficulties from observed rates.
    const auto counts = load_counts(o.input, o.mode);
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (counts.attempts(i) == 0) throw Error("problem " + counts.id(i) + " has no attempts");
      p.push_back(static_cast<double>(counts.successes(i)) / static_cast<double>(counts.attempts(i)));
      ids.push_back(counts.id(i));
    }
  }
  auto plan = oracle_optimal_allocation(p, a.k, a.budget);
  plan.problem_ids = ids;
  const auto where = emit(o.out, to_csv(plan, !a.fractional, prov), out);
  if (where != "stdout") {
    out << "allocate: " << ids.size() << " problems, budget " << format_double(a.budget) << ", k=" << a.k
        << (plan.uniform_fallback ? " (uniform fallback)" : "") << " -> " << where << "\n";
  }
  return kExitOk;
}

struct SimulateArgs {
  std::int64_t budget = 0;
  std::string strategy = "dynamic";
  std::string method = "beta-binomial";
  std::int64_t k = 0;
  std::size_t problems = 0;
};

int run_simulate(const Shared& o, const SimulateArgs& a, const Provenance& prov, std::ostream& out) {
  if (a.budget < 1) throw UsageError("--budget must be >= 1");
  if (a.k < 1) throw UsageError("--k must be >= 1");
  const auto cfg = load_spec(o.spec);
  const Method method{a.strategy == "dynamic" ? Sampling::dynamic : Sampling::uniform, require_fitter(a.method)};
  const SyntheticInput input{cfg.spec, a.problems ? a.problems : cfg.problems.value_or(100)};
  const auto result = simulate(input, method, a.budget, a.k, o.seed);
  const auto tag = method_tag(method);
  const auto where = emit(o.out, to_json(result, tag, a.budget, a.k, prov), out);
  if (where != "stdout") {
    out << "simulate: " << tag << " B=" << a.budget << " pass@" << a.k << " predicted "
        << format_double(result.prediction) << " vs true " << format_double(result.truth) << " -> " << where << "\n";
  }
  return kExitOk;
}

struct EvaluateArgs {
  std::string budgets;
  std::string ks = "log:100:10000:25";
  std::string methods = "all";
  unsigned threads = 1;
  std::size_t problems = 0;
};

int run_evaluate(const Shared& o, const EvaluateArgs& a, const Provenance& prov, std::ostream& out) {
  if (o.spec.empty() == o.input.empty()) throw UsageError("evaluate needs exactly one of --spec or --input");
  GridOptions options;
  options.budgets = checked_grid(a.budgets, "--budgets");
  options.ks = checked_grid(a.ks, "--ks");
  options.methods = parse_methods(a.methods);
  options.seed = o.seed;
  options.threads = std::max(1u, a.threads);
  EvalGrid grid;
  if (!o.input.empty()) {
    grid = run_grid(load_pools(o.input), options);
  } else {
    const auto cfg = load_spec(o.spec);
    grid = run_grid(SyntheticInput{cfg.spec, a.problems ? a.problems : cfg.problems.value_or(100)}, options);
  }
  const auto failed = std::count_if(grid.cells.begin(), grid.cells.end(), [](const auto& c) { return !c.ok(); });
  const auto where = emit(o.out, to_csv(grid, prov), out);
  if (where != "stdout") {
    out << "evaluate: " << grid.budgets.size() << " budgets x " << grid.ks.size() << " ks x " << grid.methods.size()
        << " methods, " << grid.cells.size() << " cells (" << failed << " failed) -> " << where << "\n";
  }
  return kExitOk;
}

}  // namespace

std::vector<std::int64_t> parse_int_list(std::string_view text) {
  std::vector<std::int64_t> values;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto item = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    values.push_back(parse_int(item));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return values;
}

std::vector<std::int64_t> parse_k_grid(std::string_view text) {
  std::vector<std::int64_t> ks;
  if (text.rfind("log:", 0) == 0) {
    const auto parts = parse_int_list([&] {
      std::string s(text.substr(4));
      std::replace(s.begin(), s.end(), ':', ',');
      return s;
    }());
    if (parts.size() != 3) throw std::invalid_argument("expected log:<min>:<max>:<count>");
    if (parts[0] < 1 || parts[1] < parts[0] || parts[2] < 1) {
      throw std::invalid_argument("log grid needs 1 <= min <= max and count >= 1");
    }
    ks = log_spaced(parts[0], parts[1], static_cast<std::size_t>(parts[2]));
  } else {
    ks = parse_int_list(text);
  }
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] < 1) throw std::invalid_argument("values must be >= 1");
    if (i > 0 && ks[i] <= ks[i - 1]) throw std::invalid_argument("values must be strictly increasing");
  }
  return ks;
}

std::string command_line(const std::vector<std::string>& args) {
  std::string line = "passk";
  for (const auto& arg : args) {
    line += ' ';
    const bool plain = !arg.empty() && arg.find_first_not_of("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
                                                             "0123456789-_=.,:/+@%") == std::string::npos;
    if (plain) {
      line += arg;
      continue;
    }
    line += '\'';
    for (char c : arg) line += c == '\'' ? std::string("'\\''") : std::string(1, c);
    line += '\'';
  }
  return line;
}

void write_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.close();
    if (!out) throw Error("cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("cannot rename to " + path.string() + ": " + ec.message());
  }
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"pass@k estimation, budget allocation and evaluation", "passk"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tool_version());

  Shared shared;
  FitArgs fit_args;
  PredictArgs predict_args;
  AllocateArgs allocate_args;
  SimulateArgs simulate_args;
  EvaluateArgs evaluate_args;

  const auto mode_check = CLI::IsMember({"auto", "outcomes", "counts"});
  const auto fitter_check = CLI::IsMember({"beta-binomial", "discretized-beta", "loglog-regression"});

  auto* validate = app.add_subcommand("validate", "Check a JSONL records file");
  validate->add_option("--input", shared.input, "Records file")->required();
  validate->add_option("--mode", shared.mode, "outcomes, counts or auto")->check(mode_check);
  validate->add_option("--out", shared.out, "Write the report as JSON");

  auto* fit = app.add_subcommand("fit", "Fit a pass@k model to counts");
  fit->add_option("--method", fit_args.method)->check(fitter_check);
  fit->add_option("--input", shared.input, "Records file")->required();
  fit->add_option("--mode", shared.mode)->check(mode_check);
  fit->add_option("--bins", fit_args.bins, "Bins for discretized-beta")->check(CLI::Range(2, 1000));
  fit->add_option("--bin-ratio", fit_args.bin_ratio, "Geometric width ratio for discretized-beta")
      ->check(CLI::Range(1e-6, 0.999999));
  fit->add_option("--seed", shared.seed, "Optimizer restart seed");
  fit->add_option("--out", shared.out, "Fit JSON (default stdout)");

  auto* predict = app.add_subcommand("predict", "Predict pass@k from a fit, or bootstrap an interval from counts");
  predict->add_option("--fit", predict_args.fit, "Fit JSON from the fit command");
  predict->add_option("--ks", predict_args.ks, "log:<min>:<max>:<count> or comma list");
  predict->add_option("--input", shared.input, "Records file for a bootstrap interval");
  predict->add_option("--mode", shared.mode)->check(mode_check);
  predict->add_option("--method", predict_args.method)->check(fitter_check);
  predict->add_option("--k", predict_args.k);
  predict->add_option("--resamples", predict_args.resamples);
  predict->add_option("--level", predict_args.level);
  predict->add_option("--seed", shared.seed);
  predict->add_option("--out", shared.out);

  auto* allocate = app.add_subcommand("allocate", "Variance-minimizing per-problem budgets");
  allocate->add_option("--spec", shared.spec, "Synthetic difficulty config (known difficulties)");
  allocate->add_option("--input", shared.input, "Counts for plug-in difficulties");
  allocate->add_option("--mode", shared.mode)->check(mode_check);
  allocate->add_option("--k", allocate_args.k)->required();
  allocate->add_option("--budget", allocate_args.budget, "Total attempts")->required();
  allocate->add_option("--problems", allocate_args.problems, "Override the config's problem count");
  allocate->add_flag("--fractional", allocate_args.fractional, "Keep real-valued budgets");
  allocate->add_option("--seed", shared.seed);
  allocate->add_option("--out", shared.out, "CSV (default stdout)");

  auto* sim = app.add_subcommand("simulate", "One synthetic sampling-and-fit run");
  sim->add_option("--spec", shared.spec)->required();
  sim->add_option("--budget", simulate_args.budget)->required();
  sim->add_option("--strategy", simulate_args.strategy)->check(CLI::IsMember({"dynamic", "uniform"}));
  sim->add_option("--method", simulate_args.method)->check(fitter_check);
  sim->add_option("--k", simulate_args.k)->required();
  sim->add_option("--problems", simulate_args.problems);
  sim->add_option("--seed", shared.seed)->required();
  sim->add_option("--out", shared.out);

  auto* evaluate = app.add_subcommand("evaluate", "Budget x k x method error grid");
  evaluate->add_option("--input", shared.input, "Outcome pools (JSONL)");
  evaluate->add_option("--spec", shared.spec, "Synthetic difficulty config");
  evaluate->add_option("--budgets", evaluate_args.budgets, "Comma list or log grid")->required();
  evaluate->add_option("--ks", evaluate_args.ks);
  evaluate->add_option("--methods", evaluate_args.methods, "all or comma list of method tags");
  evaluate->add_option("--problems", evaluate_args.problems);
  evaluate->add_option("--threads", evaluate_args.threads)->check(CLI::Range(1u, 1024u));
  evaluate->add_option("--seed", shared.seed)->required();
  evaluate->add_option("--out", shared.out, "CSV (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << tool_version() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "passk: " << e.what() << "\n";
    return kExitUsage;
  }

  const Provenance prov{command_line(args), shared.seed};
  try {
    if (validate->parsed()) return run_validate(shared, prov, out, err);
    if (fit->parsed()) return run_fit(shared, fit_args, prov, out);
    if (predict->parsed()) return run_predict(shared, predict_args, prov, out);
    if (allocate->parsed()) return run_allocate(shared, allocate_args, prov, out);
    if (sim->parsed()) return run_simulate(shared, simulate_args, prov, out);
    if (evaluate->parsed()) return run_evaluate(shared, evaluate_args, prov, out);
  } catch (const UsageError& e) {
    err << "passk: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "passk: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace passk::cli
