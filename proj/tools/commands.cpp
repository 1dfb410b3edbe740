#include "commands.hpp"

#include <cstdlib>
#include <fstream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "ratmax/activation.hpp"
#include "ratmax/classify.hpp"
#include "ratmax/data_io.hpp"

namespace ratmax::cli {

namespace {

using nlohmann::json;

void setup_logging() {
  static const bool once = [] {
    auto logger = spdlog::stderr_color_mt("ratmax");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    const char* env = std::getenv("RATMAX_LOG");
    spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
    return true;
  }();
  (void)once;
}

struct FitActivationArgs {
  std::string target;
  std::optional<double> slope;
  std::vector<double> interval{-1.0, 1.0};
  std::size_t grid = 2001;
  std::string method = "bisection";
  double eps = 1e-5;
  double delta = 1e-6;
  int max_iters = 500;
  std::size_t probe_points = 20001;
  std::string out;
  std::string error_curve;
};

struct TrainArgs {
  std::string train;
  std::string activation;
  std::string method = "bisection";
  double eps = 1e-5;
  double delta = 1e-6;
  int max_iters = 500;
  std::string subsample;
  std::uint64_t seed = 0;
  std::string delimiter = "auto";
  bool znorm = false;
  bool omit_timing = false;
  std::string out;
};

struct EvaluateArgs {
  std::string test;
  std::string net;
  std::optional<double> outlier_threshold;
  std::string report;
  std::string delimiter = "auto";
  bool znorm = false;
  bool omit_timing = false;
};

TargetFunction make_target(const FitActivationArgs& a) {
  if (a.target == "relu")
    return TargetFunction::relu();
  return TargetFunction::lrelu(*a.slope);
}

int fit_activation(const FitActivationArgs& a, const json& provenance) {
  SolverConfig cfg;
  cfg.eps = a.eps;
  cfg.delta = a.delta;
  cfg.max_iters = a.max_iters;
  cfg.grid = {a.interval[0], a.interval[1], a.grid};
  const Method method = parse_method(a.method);
  const TargetFunction target = make_target(a);

  spdlog::info("fitting (1,1) rational to {} on [{}, {}] with {} points by {}", target.name(),
               cfg.grid.c, cfg.grid.d, cfg.grid.points, a.method);
  const ActivationFit fit = fit_activation(target, cfg, method);
  const auto eq = equioscillation_report(fit.activation, target, cfg.grid.c, cfg.grid.d,
                                         {.probe_points = a.probe_points});

  fmt::print("deviation {:.15g}\n", fit.report.final_deviation);
  fmt::print("a0 {:.15g}\na1 {:.15g}\nb0 {:.15g}\nb1 {:.15g}\n", fit.activation.a0,
             fit.activation.a1, fit.activation.b0, fit.activation.b1);
  fmt::print("iterations {} ({:.3f} s)\n", fit.report.iterations, fit.report.wall_time_seconds);
  fmt::print("extrema {} alternating {} optimal {}\n", eq.extrema.size(), eq.alternations,
             eq.optimal ? (*eq.optimal ? "yes" : "no") : "n/a");
  for (const auto& ex : eq.extrema)
    fmt::print("  x = {:+.6f}  e = {:+.9f}\n", ex.location, ex.error);

  if (!a.out.empty()) {
    ModelFile m;
    m.activation = fit.activation;
    m.model.weights.resize(0);
    m.meta.trainer = {a.method, a.eps, a.delta, std::nullopt};
    m.meta.deviation = fit.report.final_deviation;
    json extrema = json::array();
    for (const auto& ex : eq.extrema)
      extrema.push_back({ex.location, ex.error});
    m.meta.info = {{"kind", "activation"},
                   {"target", target.name()},
                   {"slope", a.slope ? json(*a.slope) : json(nullptr)},
                   {"interval", {cfg.grid.c, cfg.grid.d}},
                   {"grid_points", cfg.grid.points},
                   {"iterations", fit.report.iterations},
                   {"wall_time_seconds", fit.report.wall_time_seconds},
                   {"equioscillation",
                    {{"alternations", eq.alternations},
                     {"optimal", eq.optimal ? json(*eq.optimal) : json(nullptr)},
                     {"extrema", extrema}}},
                   {"provenance", provenance}};
    save_model(a.out, m);
    (void)load_model(a.out);
    spdlog::info("wrote {}", a.out);
  }

  if (!a.error_curve.empty()) {
    std::ofstream csv(a.error_curve, std::ios::trunc);
    if (!csv)
      throw Error("cannot open " + a.error_curve + " for writing");
    csv << "x,f,r,e\n";
    for (const auto& p : error_curve(fit.activation, target, cfg.grid.c, cfg.grid.d,
                                     a.probe_points))
      csv << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", p.x, p.f, p.r, p.e);
    if (!csv.flush())
      throw Error("failed writing " + a.error_curve);
  }
  return 0;
}

int train(const TrainArgs& a, const json& provenance) {
  const ModelFile act_file = load_model(a.activation);
  const RationalActivation act = act_file.activation;
  LabeledDataset data = load_ucr(a.train, {parse_delimiter(a.delimiter), a.znorm});
  if (!a.subsample.empty())
    data = subsample_experiments(data, parse_subsample(a.subsample, a.seed));

  SolverConfig cfg;
  cfg.eps = a.eps;
  cfg.delta = a.delta;
  cfg.max_iters = a.max_iters;
  const Method method = parse_method(a.method);

  spdlog::info("training on {} samples of dimension {} by {}", data.size(), data.samples.dim(),
               a.method);
  const auto [model, report] = train_classifier(data, act, method, cfg);

  fmt::print("training set size {} ({}: {}, {}: {})\n", data.size(), data.label_map.class_a,
             data.count(data.label_map.class_a), data.label_map.class_b,
             data.count(data.label_map.class_b));
  fmt::print("training loss {:.9g}\n", report.final_deviation);
  fmt::print("iterations {}{}\n", report.iterations,
             report.hit_iteration_cap ? " (iteration cap reached)" : "");
  if (!a.omit_timing)
    fmt::print("training time {:.6f} s\n", report.wall_time_seconds);

  ModelFile m;
  m.activation = act;
  m.model = model;
  m.meta.label_map = data.label_map;
  m.meta.trainer = {a.method, a.eps, a.delta,
                    a.subsample.empty() ? std::nullopt : std::optional<std::uint64_t>(a.seed)};
  m.meta.deviation = report.final_deviation;
  m.meta.info = {{"kind", "network"},
                 {"train_size", data.size()},
                 {"class_counts",
                  {{data.label_map.class_a, data.count(data.label_map.class_a)},
                   {data.label_map.class_b, data.count(data.label_map.class_b)}}},
                 {"training_loss", report.final_deviation},
                 {"iterations", report.iterations},
                 {"lp_solves", report.lp_solves},
                 {"hit_iteration_cap", report.hit_iteration_cap},
                 {"dataset", data.provenance},
                 {"provenance", provenance}};
  if (!a.omit_timing)
    m.meta.info["train_wall_seconds"] = report.wall_time_seconds;
  save_model(a.out, m);
  (void)load_model(a.out);
  return 0;
}

int evaluate_cmd(const EvaluateArgs& a, const json& provenance) {
  if (a.outlier_threshold && !(*a.outlier_threshold >= 0.0))
    throw ConfigError("outlier threshold must be nonnegative");
  const ModelFile net = load_model(a.net);
  if (!net.meta.label_map)
    throw SchemaError("network file " + a.net + " has no label map");
  const LabeledDataset test =
      load_ucr(a.test, {parse_delimiter(a.delimiter), a.znorm}).relabelled(*net.meta.label_map);

  EvalReport rep = evaluate(net.activation, net.model, test, a.outlier_threshold);
  if (net.meta.info.contains("train_wall_seconds"))
    rep.train_wall_seconds = net.meta.info.at("train_wall_seconds").get<double>();

  json j = eval_report_to_json(rep, *net.meta.label_map, !a.omit_timing);
  j["test_size"] = test.size();
  j["outlier_threshold"] = a.outlier_threshold ? json(*a.outlier_threshold) : json(nullptr);
  if (rep.empty_after_filtering)
    j["warning"] = "every test sample was filtered out";
  else if (a.outlier_threshold && *a.outlier_threshold == 0.0)
    j["warning"] = "outlier threshold 0 keeps only exactly fitted samples";
  else
    j["warning"] = nullptr;
  j["training_loss"] = net.meta.deviation;
  j["provenance"] = provenance;
  write_json(a.report, j);
  {
    std::ifstream in(a.report);
    if (!json::accept(in))
      throw SchemaError("report " + a.report + " is not valid JSON after writing");
  }

  const auto& lm = *net.meta.label_map;
  const auto& c = rep.confusion.counts;
  const std::size_t w = std::max<std::size_t>({lm.class_a.size(), lm.class_b.size(), 6});
  fmt::print("accuracy {:.2f}% ({} of {} evaluated)\n", 100.0 * rep.accuracy,
             rep.confusion.correct(), rep.evaluated);
  fmt::print("test loss {:.9g}\n", rep.test_loss);
  if (a.outlier_threshold)
    fmt::print("removed outliers {}\n", rep.removed_outliers);
  if (rep.pole_samples > 0)
    fmt::print("samples at a pole {}\n", rep.pole_samples);
  if (rep.empty_after_filtering)
    spdlog::warn("every test sample was removed by the outlier threshold");
  fmt::print("confusion (rows actual, columns predicted)\n");
  fmt::print("{:>{}}  {:>8}  {:>8}\n", "", w, lm.class_a, lm.class_b);
  fmt::print("{:>{}}  {:>8}  {:>8}\n", lm.class_a, w, c[0][0], c[0][1]);
  fmt::print("{:>{}}  {:>8}  {:>8}\n", lm.class_b, w, c[1][0], c[1][1]);
  if (!a.omit_timing)
    fmt::print("testing time {:.6f} s\n", rep.test_wall_seconds);
  return 0;
}

} // namespace

int run(const std::vector<std::string>& args) {
  setup_logging();

  CLI::App app{"Uniform rational approximation and rational-activation classifiers", "ratmax"};
  app.require_subcommand(1);

  FitActivationArgs fa;
  auto* fit = app.add_subcommand("fit-activation", "fit a (1,1) rational to ReLU or LReLU");
  fit->add_option("--target", fa.target, "relu or lrelu")
      ->required()
      ->check(CLI::IsMember({"relu", "lrelu"}));
  fit->add_option("--slope", fa.slope, "negative-side slope of lrelu (required for lrelu)");
  fit->add_option("--interval", fa.interval, "interval endpoints c d")->expected(2);
  fit->add_option("--grid", fa.grid, "number of grid points")->capture_default_str();
  fit->add_option("--method", fa.method, "bisection or diffcorr")
      ->check(CLI::IsMember({"bisection", "diffcorr"}))
      ->capture_default_str();
  fit->add_option("--eps", fa.eps, "absolute precision")->capture_default_str();
  fit->add_option("--delta", fa.delta, "denominator margin (bisection)")->capture_default_str();
  fit->add_option("--max-iters", fa.max_iters, "iteration cap (diffcorr)")->capture_default_str();
  fit->add_option("--probe-points", fa.probe_points, "probe grid for the error curve")
      ->capture_default_str();
  fit->add_option("--out", fa.out, "model JSON to write");
  fit->add_option("--error-curve", fa.error_curve, "CSV of x, f(x), R(x), e(x)");

  TrainArgs ta;
  auto* tr = app.add_subcommand("train", "train a single-node rational-activation classifier");
  tr->add_option("--train", ta.train, "UCR-style training file")->required();
  tr->add_option("--activation", ta.activation, "activation model JSON")->required();
  tr->add_option("--method", ta.method, "bisection or diffcorr")
      ->check(CLI::IsMember({"bisection", "diffcorr"}))
      ->capture_default_str();
  tr->add_option("--eps", ta.eps, "absolute precision")->capture_default_str();
  tr->add_option("--delta", ta.delta, "denominator margin (bisection)")->capture_default_str();
  tr->add_option("--max-iters", ta.max_iters, "iteration cap (diffcorr)")->capture_default_str();
  tr->add_option("--subsample", ta.subsample, "random:K or imbalance:CLASS:K");
  tr->add_option("--seed", ta.seed, "subsampling seed")->capture_default_str();
  tr->add_option("--delimiter", ta.delimiter, "auto|tab|comma|whitespace")->capture_default_str();
  tr->add_flag("--znorm", ta.znorm, "z-normalise each series");
  tr->add_flag("--omit-timing", ta.omit_timing, "leave wall-clock times out of the output");
  tr->add_option("--out", ta.out, "network JSON to write")->required();

  EvaluateArgs ea;
  auto* ev = app.add_subcommand("evaluate", "evaluate a trained network on a test file");
  ev->add_option("--test", ea.test, "UCR-style test file")->required();
  ev->add_option("--net", ea.net, "network JSON")->required();
  ev->add_option("--outlier-threshold", ea.outlier_threshold,
                 "drop samples whose absolute deviation exceeds this");
  ev->add_option("--report", ea.report, "report JSON to write")->required();
  ev->add_option("--delimiter", ea.delimiter, "auto|tab|comma|whitespace")->capture_default_str();
  ev->add_flag("--znorm", ea.znorm, "z-normalise each series");
  ev->add_flag("--omit-timing", ea.omit_timing, "leave wall-clock times out of the report");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
    if (fit->parsed() && fa.target == "lrelu" && !fa.slope)
      throw CLI::ValidationError("--slope", "--slope is required for --target lrelu");
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const json provenance = {{"command", app.get_subcommands().front()->get_name()},
                           {"args", args}};
  try {
    if (fit->parsed())
      return fit_activation(fa, provenance);
    if (tr->parsed())
      return train(ta, provenance);
    return evaluate_cmd(ea, provenance);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
}

} // namespace ratmax::cli
