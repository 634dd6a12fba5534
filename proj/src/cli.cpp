#include "dtcae/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "dtcae/data.hpp"
#include "dtcae/errors.hpp"
#include "dtcae/gradcheck.hpp"
#include "dtcae/params_io.hpp"
#include "dtcae/solver.hpp"
#include "json.hpp"

namespace dtcae {

namespace fs = std::filesystem;

namespace {

/// Everything a command may need; validated before any work starts.
struct RunConfig {
  Hyper hyper;
  SynthConfig synth;
  std::string data;
  std::string out = ".";
  std::string params;
  std::uint64_t seed = 1;
  std::string attrScope = "all";
  bool allTargets = false;
  std::vector<double> c1Grid, c2Grid, c3Grid;
  std::vector<std::uint64_t> seeds;
  std::size_t gradcheckInstances = 20;
};

std::string fmt_real(double v) {
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
      return kExitConfig;
    case ErrorKind::Divergence:
    case ErrorKind::Singular:
      return kExitDivergence;
    default:
      return kExitData;
  }
}

void require_data(const RunConfig& cfg) {
  if (cfg.data.empty()) fail(ErrorKind::Config, "--data is required");
}

fs::path out_dir(const RunConfig& cfg) {
  fs::path dir(cfg.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create output directory " + dir.string());
  return dir;
}

double labeled_target_accuracy(const MultiDomainDataset& train, const ModelParams& params) {
  const DomainDataset& target = train.target();
  DomainDataset labeled;
  labeled.points.assign(target.points.begin(), target.points.begin() + static_cast<long>(target.labeledCount));
  labeled.labeledCount = labeled.points.size();
  return evaluate(labeled, params, train.targetIndex);
}

/// Split, fit and test with domain `t` as the target.
double run_protocol(const MultiDomainDataset& ds, std::size_t t, const Hyper& hyper, std::uint64_t seed) {
  const MultiDomainDataset reordered = with_target(ds, t);
  const TargetSplit split = split_target(reordered, SplitSpec{seed});
  const FitResult fitted = fit(split.train, hyper, seed);
  return evaluate(split.test, fitted.params, split.train.targetIndex);
}

int cmd_synth(const RunConfig& cfg, std::ostream& out) {
  SynthConfig synth = cfg.synth;
  synth.seed = cfg.seed;
  validate(synth);
  const MultiDomainDataset ds = synth_generate(synth);
  const fs::path path = out_dir(cfg) / "dataset.jsonl";
  save_dataset(ds, path);
  std::size_t points = 0;
  for (const auto& d : ds.domains) points += d.size();
  out << "wrote " << path.string() << ": T=" << ds.T() << " points=" << points << " d=" << ds.d
      << " attributes=" << ds.numAttributes << " classes=" << ds.numClasses << "\n";
  return kExitOk;
}

int cmd_train(const RunConfig& cfg, std::ostream& out) {
  require_data(cfg);
  const MultiDomainDataset ds = load_dataset(cfg.data);
  const TargetSplit split = split_target(ds, SplitSpec{cfg.seed});
  const FitResult fitted = fit(split.train, cfg.hyper, cfg.seed);
  const fs::path dir = out_dir(cfg);
  save_params(fitted.params, dir / "params.json");
  save_report(fitted.report, dir / "report.json");
  const double final = fitted.report.objectiveTrace.empty() ? 0.0 : fitted.report.objectiveTrace.back().total;
  out << "iterations " << fitted.report.iterations << (fitted.report.converged ? " (converged)" : "") << "\n"
      << "final objective " << fmt_real(final) << "\n"
      << "labeled target training accuracy " << fmt_real(labeled_target_accuracy(split.train, fitted.params))
      << "\n";
  return kExitOk;
}

int cmd_eval(const RunConfig& cfg, std::ostream& out) {
  require_data(cfg);
  const MultiDomainDataset ds = load_dataset(cfg.data);
  nlohmann::json rates = nlohmann::json::array();
  double sum = 0.0;
  if (cfg.allTargets) {
    for (std::size_t t = 0; t < ds.T(); ++t) {
      const double acc = run_protocol(ds, t, cfg.hyper, cfg.seed);
      out << "domain " << t << " rate " << fmt_real(acc) << "\n";
      rates.push_back({{"target", t}, {"accuracy", acc}});
      sum += acc;
    }
  } else {
    const fs::path paramsPath = cfg.params.empty() ? fs::path(cfg.out) / "params.json" : fs::path(cfg.params);
    const ModelParams params = load_params(paramsPath);
    const TargetSplit split = split_target(ds, SplitSpec{cfg.seed});
    const double acc = evaluate(split.test, params, ds.targetIndex);
    out << "domain " << ds.targetIndex << " rate " << fmt_real(acc) << "\n";
    rates.push_back({{"target", ds.targetIndex}, {"accuracy", acc}});
    sum = acc;
  }
  const double average = sum / static_cast<double>(rates.size());
  out << "average classification rate " << fmt_real(average) << "\n";
  std::ofstream file(out_dir(cfg) / "eval.json");
  file << nlohmann::json{{"rates", rates}, {"average", average}}.dump(2) << "\n";
  return kExitOk;
}

int cmd_gradcheck(const RunConfig& cfg, std::ostream& out) {
  GradCheckOptions options;
  options.instances = cfg.gradcheckInstances;
  const GradCheckReport report = run_gradcheck(cfg.seed, options);
  bool ok = true;
  for (Family f : {Family::Attribute, Family::Shared, Family::Auxiliary, Family::Target}) {
    const double e = report.maxRelError[static_cast<std::size_t>(f)];
    ok = ok && e <= 1e-4;
    out << family_name(f) << " max relative error " << std::scientific << std::setprecision(3) << e
        << std::defaultfloat << "\n";
  }
  out << report.instances << " instances, " << report.comparedEntries << " entries: " << (ok ? "PASS" : "FAIL")
      << "\n";
  return ok ? kExitOk : kExitGradcheck;
}

int cmd_ablate(const RunConfig& cfg, std::ostream& out) {
  require_data(cfg);
  const MultiDomainDataset ds = load_dataset(cfg.data);
  const std::vector<double> c1s = cfg.c1Grid.empty() ? std::vector<double>{cfg.hyper.C1} : cfg.c1Grid;
  const std::vector<double> c2s = cfg.c2Grid.empty() ? std::vector<double>{cfg.hyper.C2} : cfg.c2Grid;
  const std::vector<double> c3s = cfg.c3Grid.empty() ? std::vector<double>{cfg.hyper.C3} : cfg.c3Grid;
  const std::vector<std::uint64_t> seeds = cfg.seeds.empty() ? std::vector<std::uint64_t>{cfg.seed} : cfg.seeds;
  std::vector<std::size_t> targets;
  if (cfg.allTargets) {
    for (std::size_t t = 0; t < ds.T(); ++t) targets.push_back(t);
  } else {
    targets.push_back(ds.targetIndex);
  }

  std::ostringstream csv;
  csv << "c1,c2,c3,seed,target,accuracy\n";
  for (double c1 : c1s)
    for (double c2 : c2s)
      for (double c3 : c3s)
        for (std::uint64_t seed : seeds)
          for (std::size_t t : targets) {
            Hyper h = cfg.hyper;
            h.C1 = c1;
            h.C2 = c2;
            h.C3 = c3;
            const double acc = run_protocol(ds, t, h, seed);
            csv << fmt_real(c1) << ',' << fmt_real(c2) << ',' << fmt_real(c3) << ',' << seed << ',' << t << ','
                << fmt_real(acc) << "\n";
          }
  const fs::path path = out_dir(cfg) / "ablation.csv";
  std::ofstream file(path);
  if (!file) fail(ErrorKind::Io, "cannot write " + path.string());
  file << csv.str();
  out << csv.str();
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Domain-transfer convolutional attribute embedding: train and evaluate", "dtcae"};
  app.set_config("--config", "", "flat key=value config file; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  Hyper& h = cfg.hyper;
  app.add_option("--data", cfg.data, "dataset file (JSON Lines)");
  app.add_option("--out", cfg.out, "output directory");
  app.add_option("--params", cfg.params, "params file for eval (default OUT/params.json)");
  app.add_option("--seed", cfg.seed, "seed for splitting, initialization and synthesis");
  app.add_option("--c1", h.C1, "attribute-fit weight")->check(CLI::NonNegativeNumber);
  app.add_option("--c2", h.C2, "domain-matching weight")->check(CLI::NonNegativeNumber);
  app.add_option("--c3", h.C3, "neighborhood weight")->check(CLI::NonNegativeNumber);
  app.add_option("--alpha", h.alpha, "window length")->check(CLI::PositiveNumber);
  app.add_option("--ma", h.ma, "attribute filters")->check(CLI::PositiveNumber);
  app.add_option("--m0", h.m0, "shared filters")->check(CLI::PositiveNumber);
  app.add_option("--mt", h.mt, "domain-specific filters")->check(CLI::PositiveNumber);
  app.add_option("--tau", h.tau, "gradient step")->check(CLI::NonNegativeNumber);
  app.add_option("--eta", h.eta, "maximum outer iterations");
  app.add_option("--eps", h.eps, "objective-change threshold")->check(CLI::NonNegativeNumber);
  app.add_option("--lambda", h.lambda, "ridge added to every Gram matrix")->check(CLI::NonNegativeNumber);
  app.add_option("--k", h.k, "neighbors per target point");
  app.add_option("--inner-steps", h.innerSteps, "gradient steps per filter")->check(CLI::PositiveNumber);
  app.add_option("--backtrack", h.backtrack, "halve the step until the objective does not rise");
  app.add_option("--freeze-trace", h.freezeTraceWithinSweep, "reuse pooling argmax within a sweep");
  app.add_option("--attr-head", h.attributeHead, "fit U_a (false holds it at zero)");
  app.add_option("--attr-scope", cfg.attrScope, "points in the attribute fit")
      ->check(CLI::IsMember({"all", "labeled-target"}));
  app.add_option("--all-targets", cfg.allTargets, "treat each domain as the target in turn");

  SynthConfig& s = cfg.synth;
  app.add_option("--domains", s.T, "synth: number of domains")->check(CLI::Range(2, 1 << 20));
  app.add_option("--classes", s.numClasses, "synth: classes")->check(CLI::PositiveNumber);
  app.add_option("--per-domain", s.perDomain, "synth: points per domain")->check(CLI::PositiveNumber);
  app.add_option("--d", s.d, "synth: feature dimension")->check(CLI::PositiveNumber);
  app.add_option("--attributes", s.numAttributes, "synth: attributes")->check(CLI::PositiveNumber);
  app.add_option("--min-instances", s.minInstances, "synth: fewest instances per point");
  app.add_option("--max-instances", s.maxInstances, "synth: most instances per point");
  app.add_option("--noise", s.noise, "synth: instance noise")->check(CLI::NonNegativeNumber);
  app.add_option("--shift", s.domainShift, "synth: domain shift scale")->check(CLI::NonNegativeNumber);

  app.add_option("--c1-grid", cfg.c1Grid, "ablate: C1 values")->delimiter(',');
  app.add_option("--c2-grid", cfg.c2Grid, "ablate: C2 values")->delimiter(',');
  app.add_option("--c3-grid", cfg.c3Grid, "ablate: C3 values")->delimiter(',');
  app.add_option("--seeds", cfg.seeds, "ablate: seeds")->delimiter(',');
  app.add_option("--instances", cfg.gradcheckInstances, "gradcheck: random instances")->check(CLI::PositiveNumber);

  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset into OUT/dataset.jsonl");
  auto* train = app.add_subcommand("train", "split, fit, write OUT/params.json and OUT/report.json");
  auto* evalc = app.add_subcommand("eval", "classification rate on the held-out target split");
  auto* gradcheck = app.add_subcommand("gradcheck", "compare analytic and finite-difference gradients");
  auto* ablate = app.add_subcommand("ablate", "grid over C1/C2/C3 and seeds into OUT/ablation.csv");
  for (auto* sub : {synth, train, evalc, gradcheck, ablate}) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    h.attributeFitScope = cfg.attrScope == "all" ? AttributeFitScope::All : AttributeFitScope::LabeledTargetOnly;
    validate(h);
    s.alpha = h.alpha;
    if (synth->parsed()) return cmd_synth(cfg, out);
    if (train->parsed()) return cmd_train(cfg, out);
    if (evalc->parsed()) return cmd_eval(cfg, out);
    if (gradcheck->parsed()) return cmd_gradcheck(cfg, out);
    return cmd_ablate(cfg, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace dtcae
