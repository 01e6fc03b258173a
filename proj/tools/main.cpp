#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cli_support.hpp"
#include "eitqhe/analysis/engines.hpp"
#include "eitqhe/analysis/errors.hpp"
#include "eitqhe/analysis/fit.hpp"
#include "eitqhe/analysis/predictions.hpp"
#include "eitqhe/analysis/svg.hpp"
#include "eitqhe/atomdata/table.hpp"
#include "eitqhe/datagen/dataset.hpp"
#include "eitqhe/datagen/generate.hpp"
#include "eitqhe/mlp/model_io.hpp"
#include "eitqhe/mlp/predict.hpp"
#include "eitqhe/mlp/train.hpp"
#include "eitqhe/physics/physics.hpp"

namespace fs = std::filesystem;
using namespace eitqhe;
using cli::Error;
using cli::ErrorKind;

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  return out;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(ErrorKind::IoError, "cannot create directory " + dir);
}

template <typename F>
void write_file(const std::string& path, F&& body) {
  auto out = open_out(path);
  body(out);
  out.flush();
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path);
}

// ---- gen-data ---------------------------------------------------------------

struct GenArgs {
  std::string atoms;
  std::size_t count = 300000;
  std::uint64_t seed = cli::kDefaultSeed;
  std::string out;
  std::size_t workers = 1;
  std::string policy = "permissive";
  std::optional<double> omega_c;
  std::string hist_column;
  std::size_t bins = 50;
};

std::string run_gen(const GenArgs& a) {
  datagen::GenerationSpec spec;
  if (!a.atoms.empty()) spec.atoms = cli::parse_atoms(a.atoms);
  spec.count = a.count;
  spec.seed = a.seed;
  spec.policy = a.policy == "strict" ? atomdata::SelectionPolicy::Strict : atomdata::SelectionPolicy::Permissive;
  spec.omega_c_override = a.omega_c;
  const auto data = datagen::generate_dataset(spec, datagen::builtin_factory(), a.workers);

  write_file(a.out, [&](std::ostream& os) { datagen::write_dataset(os, data.records); });
  write_file(a.out + ".report", [&](std::ostream& os) { datagen::write_report(os, spec, data.report); });
  if (datagen::load_dataset(a.out).size() != data.records.size()) {
    throw Error(ErrorKind::IoError, "dataset did not read back intact: " + a.out);
  }
  std::map<datagen::Regime, std::size_t> regimes;
  for (const auto& r : data.records) ++regimes[datagen::regime_label(r.t_ratio())];
  if (!a.hist_column.empty() && !data.records.empty()) {
    const auto col = datagen::column_index(a.hist_column);
    double lo = datagen::column_value(data.records.front(), col), hi = lo;
    for (const auto& r : data.records) {
      lo = std::min(lo, datagen::column_value(r, col));
      hi = std::max(hi, datagen::column_value(r, col));
    }
    if (hi == lo) hi = lo + 1.0;
    const auto h = datagen::histogram(data.records, a.hist_column, datagen::uniform_edges(lo, hi, a.bins));
    write_file(a.out + ".hist.csv", [&](std::ostream& os) { datagen::write_histogram(os, h); });
  }
  fmt::print("records={} candidates={} low={} mid={} high={}\n", data.records.size(), data.report.candidates,
             regimes[datagen::Regime::Low], regimes[datagen::Regime::Mid], regimes[datagen::Regime::High]);
  return a.out + ".run.meta";
}

// ---- train ------------------------------------------------------------------

struct TrainArgs {
  std::string data;
  std::string layers = "128,128";
  std::string act = "tanh";
  double lr = 0.01;
  int epochs = 100;
  int batch = 256;
  int patience = 10;
  double val_frac = 0.2;
  std::uint64_t seed = cli::kDefaultSeed;
  std::string out;
  std::string history;
};

std::string run_train(const TrainArgs& a, bool force) {
  const auto history_path = a.history.empty() ? a.out + ".history.csv" : a.history;
  cli::guard_outputs({a.data}, {a.out, history_path}, force);
  const auto hidden = cli::parse_list<int>(a.layers, "layer");
  const auto data = datagen::load_dataset(a.data);
  mlp::TrainOptions opt;
  opt.epochs = a.epochs;
  opt.batch_size = a.batch;
  opt.learning_rate = a.lr;
  opt.patience = a.patience;
  opt.seed = a.seed;
  const auto run = mlp::train_on_dataset(data, hidden, mlp::parse_activation(a.act), opt, 1.0 - a.val_frac);

  mlp::save_model_file(a.out, run.model);
  write_file(history_path, [&](std::ostream& os) { mlp::write_history(os, run.history); });
  const auto back = mlp::load_model_file(a.out);
  if (back.parameter_count() != run.model.parameter_count()) {
    throw Error(ErrorKind::IoError, "model did not read back intact: " + a.out);
  }
  if (!run.history.epochs.empty()) {
    const auto& e = run.history.last();
    fmt::print("epochs={} train_loss={:.6g} train_mae={:.6g} val_loss={:.6g} val_mae={:.6g} mae_ratio={:.4f}{}\n",
               run.history.epochs.size(), e.train_loss, e.train_mae, e.val_loss, e.val_mae,
               e.val_mae / e.train_mae, run.history.early_stopped ? " early_stopped" : "");
  }
  return a.out + ".run.meta";
}

// ---- sweep ------------------------------------------------------------------

struct SweepArgs {
  std::string data;
  std::string space;
  std::string sizes;
  int epochs = 100;
  int batch = 256;
  int patience = 10;
  double val_frac = 0.2;
  std::uint64_t seed = cli::kDefaultSeed;
  std::size_t workers = 1;
  std::string out;
};

mlp::SearchSpace load_space(const std::string& path) {
  mlp::SearchSpace s;
  for (const auto& [k, v] : cli::read_key_values(path)) {
    if (k == "layers") {
      s.layer_counts = cli::parse_list<int>(v, "layers");
    } else if (k == "widths") {
      s.widths = cli::parse_list<int>(v, "widths");
    } else if (k == "lr") {
      s.learning_rates = cli::parse_list<double>(v, "lr");
    } else if (k == "act") {
      s.activations.clear();
      for (const auto& name : cli::parse_list<std::string>(v, "act")) {
        if (name != "tanh" && name != "relu") throw Error(ErrorKind::UsageError, "unknown activation " + name);
        s.activations.push_back(mlp::parse_activation(name));
      }
    } else {
      throw Error(ErrorKind::UsageError, fmt::format("{}: unknown key '{}'", path, k));
    }
  }
  return s;
}

std::string run_sweep(const SweepArgs& a) {
  const auto space = a.space.empty() ? mlp::SearchSpace{} : load_space(a.space);
  const auto sizes = a.sizes.empty() ? std::vector<std::size_t>{} : cli::parse_list<std::size_t>(a.sizes, "size");
  auto data = datagen::load_dataset(a.data);
  ensure_dir(a.out);

  mlp::SweepOptions opt;
  opt.train.epochs = a.epochs;
  opt.train.batch_size = a.batch;
  opt.train.patience = a.patience;
  opt.base_seed = a.seed;
  opt.workers = a.workers;
  const auto split = datagen::split_dataset(data, 1.0 - a.val_frac, a.seed);
  const auto result = mlp::hyperparameter_sweep(mlp::to_matrices(split.train), mlp::to_matrices(split.validation),
                                                mlp::enumerate_space(space), opt);
  write_file(a.out + "/sweep.csv", [&](std::ostream& os) { mlp::write_sweep(os, result); });

  if (!sizes.empty()) {
    Rng rng(a.seed);
    for (std::size_t i = data.size(); i > 1; --i) std::swap(data[i - 1], data[rng.index(i)]);
    const auto study = mlp::size_study(data, result, sizes, opt, a.seed);
    write_file(a.out + "/sizes.csv", [&](std::ostream& os) { mlp::write_size_study(os, study); });
  }
  const auto& best = result.rows[result.best_index];
  fmt::print("configs={} best=\"{}\" val_loss={:.6g} val_mae={:.6g} two_hidden_lowest_val_mae={}\n",
             result.rows.size(), best.config.label(), best.val.loss, best.val.mae, result.two_hidden_lowest_val_mae);
  return a.out + "/run.meta";
}

// ---- predict ----------------------------------------------------------------

struct PredictArgs {
  std::string model;
  std::string in;
  std::string out;
};

std::string run_predict(const PredictArgs& a, bool force) {
  cli::guard_outputs({a.model, a.in}, {a.out}, force);
  const auto model = mlp::load_model_file(a.model);
  const auto data = datagen::load_dataset(a.in);
  std::vector<analysis::PredictionRecord> preds;
  preds.reserve(data.size());
  constexpr std::size_t kChunk = 4096;
  for (std::size_t start = 0; start < data.size(); start += kChunk) {
    const std::size_t n = std::min(kChunk, data.size() - start);
    mlp::Matrix x(mlp::kInputSize, static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (int r = 0; r < mlp::kInputSize; ++r) {
        x(r, static_cast<Eigen::Index>(i)) = data[start + i].inputs[static_cast<std::size_t>(r)];
      }
    }
    const mlp::Matrix y = mlp::forward(model, x);
    for (std::size_t i = 0; i < n; ++i) {
      std::array<double, 6> raw{};
      for (int r = 0; r < mlp::kOutputSize; ++r) raw[static_cast<std::size_t>(r)] = y(r, static_cast<Eigen::Index>(i));
      const auto st = mlp::round_states(raw);
      analysis::PredictionRecord p;
      p.inputs = data[start + i].inputs;
      p.predicted = st.rounded;
      p.raw = st.raw;
      p.actual = data[start + i].targets;
      preds.push_back(p);
    }
  }
  write_file(a.out, [&](std::ostream& os) { analysis::write_predictions(os, preds); });
  if (analysis::load_predictions(a.out).size() != preds.size()) {
    throw Error(ErrorKind::IoError, "predictions did not read back intact: " + a.out);
  }
  std::size_t exact = 0;
  for (const auto& p : preds) exact += p.predicted == *p.actual;
  fmt::print("records={} exact_matches={}\n", preds.size(), exact);
  return a.out + ".run.meta";
}

// ---- analyze ----------------------------------------------------------------

struct AnalyzeArgs {
  std::string pred;
  std::string regime;
  std::string out;
  bool svg = false;
  double curve_min = 1e7;
  double curve_max = 1e9;
  int curve_points = 41;
};

void svg_file(const std::string& path, const analysis::svg::Plot& p) {
  write_file(path, [&](std::ostream& os) { analysis::svg::write(os, p); });
}

std::string run_analyze(const AnalyzeArgs& a) {
  const auto preds = analysis::load_predictions(a.pred);
  const auto regime = datagen::parse_regime(a.regime);
  ensure_dir(a.out);

  const auto sets = analysis::select_common_engines(preds, regime);
  std::map<std::pair<int, int>, std::unique_ptr<atomdata::BuiltinProvider>> owned;
  analysis::ProviderMap providers;
  for (const auto& s : sets) {
    for (const auto& m : s.members) {
      auto& slot = owned[{m.z, m.a}];
      if (!slot && atomdata::is_known_isotope(m.z, m.a)) slot = atomdata::builtin_provider(m.z, m.a);
      providers[{m.z, m.a}] = slot.get();
    }
  }
  std::vector<analysis::EngineComparisonRow> rows;
  for (const auto& s : sets) {
    for (auto& r : analysis::compare_atoms(s, providers)) rows.push_back(std::move(r));
  }
  for (const auto& r : rows) {
    if (const auto problem = analysis::row_problem(r)) {
      throw Error(ErrorKind::InvalidConfig, fmt::format("Z={} A={}: {}", r.z, r.a, *problem));
    }
  }
  write_file(a.out + "/comparison.csv", [&](std::ostream& os) { analysis::write_comparison(os, rows); });
  std::size_t tagged = 0;
  for (const auto& r : rows) tagged += !r.ok();
  fmt::print("regime={} common_triples={} rows={} tagged={}\n", a.regime, sets.size(), rows.size(), tagged);

  if (!sets.empty()) {
    const auto& e = sets.front().members.front();
    const auto& provider = *providers.at({e.z, e.a});
    const auto cfg = physics::EngineConfig::make(provider, e.levels.level1, e.levels.level2, e.levels.level3, 0.0,
                                                 e.t0, e.power);
    const auto curve = analysis::ergotropy_curve(cfg, provider, datagen::log_grid(a.curve_min, a.curve_max,
                                                                                  static_cast<std::size_t>(a.curve_points)));
    write_file(a.out + "/curve.csv", [&](std::ostream& os) { analysis::write_curve(os, curve); });
    fmt::print("curve Z={} A={} {} {} {} saturation_hz={:.4g}\n", e.z, e.a, atomdata::label(e.levels.level1),
               atomdata::label(e.levels.level2), atomdata::label(e.levels.level3), curve.saturation_hz());
    if (a.svg) {
      analysis::svg::Plot p{"Ergotropy versus coupling", "Omega_C (Hz)", "ergotropy (Hz)", {}, {},
                            analysis::svg::Style::Line, true};
      for (const auto& pt : curve.points) {
        p.x.push_back(pt.omega_c_hz);
        p.y.push_back(pt.ergotropy_hz);
      }
      svg_file(a.out + "/curve.svg", p);
      analysis::svg::Plot w{"Work by atom", "Z", "W (J)", {}, {}, analysis::svg::Style::Bars, false};
      for (const auto& r : rows) {
        if (!r.ok()) continue;
        w.x.push_back(r.z);
        w.y.push_back(r.work);
      }
      svg_file(a.out + "/comparison_work.svg", w);
    }
  }

  if (!preds.empty() && preds.front().actual) {
    const auto report = analysis::prediction_error_report(preds);
    write_file(a.out + "/scatter.csv", [&](std::ostream& os) { analysis::write_scatter(os, report); });
    std::string modes;
    for (std::size_t c = 0; c < 6; ++c) {
      const auto name = analysis::kTargetNames[c];
      write_file(fmt::format("{}/errors_{}.csv", a.out, name),
                 [&](std::ostream& os) { analysis::write_error_histogram(os, report.histograms[c]); });
      modes += fmt::format(" {}={}", name, report.histograms[c].mode());
      if (a.svg) {
        analysis::svg::Plot h{fmt::format("{} prediction error", name), "error", "count", {}, {},
                              analysis::svg::Style::Bars, false};
        for (std::size_t i = 0; i < report.histograms[c].counts.size(); ++i) {
          h.x.push_back(report.histograms[c].centre(i));
          h.y.push_back(static_cast<double>(report.histograms[c].counts[i]));
        }
        svg_file(fmt::format("{}/errors_{}.svg", a.out, name), h);
        analysis::svg::Plot s{fmt::format("{} predicted versus true", name), "true", "predicted", {}, {},
                              analysis::svg::Style::Points, false};
        for (std::size_t i = 0; i < report.actual.size(); ++i) {
          s.x.push_back(report.actual[i][c]);
          s.y.push_back(report.predicted[i][c]);
        }
        svg_file(fmt::format("{}/scatter_{}.svg", a.out, name), s);
      }
    }
    fmt::print("error_modes{}\n", modes);
  }
  return a.out + "/run.meta";
}

// ---- fit-ergotropy ----------------------------------------------------------

struct FitArgs {
  std::string curve;
  std::string out;
  std::string x = "omega_c_hz";
  std::string y = "ergotropy_hz";
};

std::string run_fit(const FitArgs& a, bool force) {
  cli::guard_outputs({a.curve}, {a.out}, force);
  std::ifstream in(a.curve);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + a.curve);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::ParseError, "line 1: empty curve file");
  const auto head = csv::split(csv::trim(line));
  auto col = [&](const std::string& name) {
    const auto it = std::find(head.begin(), head.end(), name);
    if (it == head.end()) throw Error(ErrorKind::UnknownColumn, fmt::format("{} has no column '{}'", a.curve, name));
    return static_cast<std::size_t>(it - head.begin());
  };
  const auto cx = col(a.x), cy = col(a.y);
  std::vector<double> xs, ys;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (csv::trim(line).empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != head.size()) {
      throw Error(ErrorKind::ParseError, fmt::format("line {}: expected {} fields", lineno, head.size()));
    }
    xs.push_back(csv::to_double(f[cx], lineno));
    ys.push_back(csv::to_double(f[cy], lineno));
  }
  const auto fit = analysis::fit_exponential(xs, ys);
  write_file(a.out, [&](std::ostream& os) { analysis::write_fit(os, fit); });
  fmt::print("a={:.6g} b={:.6g} c={:.6g} r2={:.6f} converged={}{}\n", fit.a, fit.b, fit.c, fit.r2, fit.converged,
             fit.ill_conditioned ? " ill_conditioned" : "");
  return a.out + ".run.meta";
}

// ---- physics-eval -----------------------------------------------------------

struct PhysicsArgs {
  double omega13 = 0.0;
  double omega23 = 0.0;
  double gamma31 = 0.0;
  double gamma32 = 0.0;
  double t0 = 0.0;
  std::optional<double> t13;
  std::optional<double> t23;
  double omega_c = 0.0;
  std::string convention = "main";
  std::string out;
};

std::string run_physics(const PhysicsArgs& a) {
  const auto rates = physics::derive_rates(a.omega13, a.gamma31, a.omega23, a.gamma32, a.t13.value_or(a.t0),
                                           a.t23.value_or(a.t0));
  const auto pop = physics::steady_state_populations(rates.r13, rates.r23, a.omega_c);
  std::ostringstream os;
  auto put = [&](const char* key, double v) { os << fmt::format("{}={:.12g}\n", key, v); };
  put("r13", rates.r13);
  put("r23", rates.r23);
  put("rho11", pop.rho11);
  put("rho22", pop.rho22);
  put("rho33", pop.rho33);
  put("ergotropy_j", physics::ergotropy(a.omega23, pop.rho33, pop.rho22));
  try {
    put("theta", physics::theta_closed_form(rates, a.omega_c));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::SingularDenominator) throw;
    os << "theta=singular\n";
  }
  const double b0 = physics::brightness_line_center(rates, a.omega_c);
  put("b0", b0);
  const auto temp = physics::output_temperature(b0, a.omega13, a.t0);
  put("t_out", temp.t_out);
  put("t_ratio", temp.t_ratio);
  const auto we = physics::work_and_entropy(a.omega13, a.omega23, a.t0, temp.t_out,
                                            a.convention == "supplementary" ? physics::EntropyConvention::Supplementary
                                                                            : physics::EntropyConvention::Main);
  put("work_j", we.work);
  put("delta_e_j", we.delta_e);
  put("t_delta_s_j", we.t_delta_s);
  put("tb_bound_k", we.tb_bound);
  std::cout << os.str();
  if (a.out.empty()) return {};
  write_file(a.out, [&](std::ostream& f) { f << os.str(); });
  return a.out + ".run.meta";
}

// ---- export-check -----------------------------------------------------------

int run_export_check(const std::string& table) {
  const auto report = atomdata::check_atomic_table_file(table);
  if (report.ok) {
    fmt::print("ok levels={} transitions={}\n", report.levels, report.transitions);
    return 0;
  }
  for (const auto& p : report.problems) fmt::print(stderr, "{}: {}\n", table, p);
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Three-level EIT heat engine toolkit: data generation, inverse-design networks and analysis"};
  app.set_version_flag("--version", cli::kVersion);
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();

  bool force = false;
  std::string meta_override;
  std::string config_path;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key=value file; command-line flags take precedence");
    sub->add_flag("--force", force, "allow outputs to overwrite inputs");
    sub->add_option("--meta", meta_override, "manifest path (default next to the artifact)");
  };

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "generate a labelled dataset");
  gen_cmd->add_option("--atoms", gen.atoms, "Z:A[,Z:A...] (default: all supported isotopes)");
  gen_cmd->add_option("--count", gen.count, "records to accept");
  gen_cmd->add_option("--seed", gen.seed, "base seed");
  gen_cmd->add_option("--out", gen.out, "dataset CSV")->required();
  gen_cmd->add_option("--workers", gen.workers, "worker threads")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--policy", gen.policy, "selection-rule policy")->check(CLI::IsMember({"permissive", "strict"}));
  gen_cmd->add_option("--omega-c", gen.omega_c, "fixed coupling Rabi frequency in rad/s (debug)");
  gen_cmd->add_option("--hist", gen.hist_column, "also write a histogram of this column");
  gen_cmd->add_option("--bins", gen.bins, "histogram bins")->check(CLI::PositiveNumber);
  common(gen_cmd);

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "train one network");
  train_cmd->add_option("--data", tr.data, "dataset CSV")->required();
  train_cmd->add_option("--layers", tr.layers, "hidden widths, comma separated");
  train_cmd->add_option("--act", tr.act, "activation")->check(CLI::IsMember({"tanh", "relu"}));
  train_cmd->add_option("--lr", tr.lr, "Adam learning rate")->check(CLI::PositiveNumber);
  train_cmd->add_option("--epochs", tr.epochs, "maximum epochs")->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--batch", tr.batch, "minibatch size")->check(CLI::PositiveNumber);
  train_cmd->add_option("--patience", tr.patience, "early-stopping patience, 0 disables")->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--val-frac", tr.val_frac, "validation fraction")->check(CLI::Range(0.01, 0.99));
  train_cmd->add_option("--seed", tr.seed, "split, initialisation and batch-order seed");
  train_cmd->add_option("--out", tr.out, "model file")->required();
  train_cmd->add_option("--history", tr.history, "per-epoch metrics CSV (default MODEL.history.csv)");
  common(train_cmd);

  SweepArgs sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "hyperparameter grid search and data-size study");
  sweep_cmd->add_option("--data", sw.data, "dataset CSV")->required();
  sweep_cmd->add_option("--space", sw.space, "search space file (layers=, widths=, lr=, act=)");
  sweep_cmd->add_option("--sizes", sw.sizes, "data sizes for the per-family study, comma separated");
  sweep_cmd->add_option("--epochs", sw.epochs, "maximum epochs per configuration")->check(CLI::NonNegativeNumber);
  sweep_cmd->add_option("--batch", sw.batch, "minibatch size")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--patience", sw.patience, "early-stopping patience")->check(CLI::NonNegativeNumber);
  sweep_cmd->add_option("--val-frac", sw.val_frac, "validation fraction")->check(CLI::Range(0.01, 0.99));
  sweep_cmd->add_option("--seed", sw.seed, "base seed");
  sweep_cmd->add_option("--workers", sw.workers, "worker threads")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--out", sw.out, "output directory")->required();
  common(sweep_cmd);

  PredictArgs pr;
  auto* predict_cmd = app.add_subcommand("predict", "predict level 2 and 3 quantum numbers");
  predict_cmd->add_option("--model", pr.model, "model file")->required();
  predict_cmd->add_option("--in", pr.in, "dataset CSV")->required();
  predict_cmd->add_option("--out", pr.out, "predictions CSV")->required();
  common(predict_cmd);

  AnalyzeArgs an;
  auto* analyze_cmd = app.add_subcommand("analyze", "compare predicted engines across atoms");
  analyze_cmd->add_option("--pred", an.pred, "predictions CSV")->required();
  analyze_cmd->add_option("--regime", an.regime, "T/T0 regime")->required()->check(CLI::IsMember({"low", "mid", "high"}));
  analyze_cmd->add_option("--out", an.out, "output directory")->required();
  analyze_cmd->add_flag("--svg", an.svg, "also write SVG plots");
  analyze_cmd->add_option("--curve-min", an.curve_min, "lowest coupling frequency, Hz")->check(CLI::PositiveNumber);
  analyze_cmd->add_option("--curve-max", an.curve_max, "highest coupling frequency, Hz")->check(CLI::PositiveNumber);
  analyze_cmd->add_option("--curve-points", an.curve_points, "curve samples")->check(CLI::Range(2, 100000));
  common(analyze_cmd);

  FitArgs fa;
  auto* fit_cmd = app.add_subcommand("fit-ergotropy", "fit the saturating exponential to a curve CSV");
  fit_cmd->add_option("--curve", fa.curve, "curve CSV")->required();
  fit_cmd->add_option("--out", fa.out, "fit report")->required();
  fit_cmd->add_option("--x", fa.x, "abscissa column");
  fit_cmd->add_option("--y", fa.y, "ordinate column");
  common(fit_cmd);

  PhysicsArgs ph;
  auto* phys_cmd = app.add_subcommand("physics-eval", "evaluate one engine from explicit rates");
  phys_cmd->add_option("--omega13", ph.omega13, "1-3 transition frequency, rad/s")->required();
  phys_cmd->add_option("--omega23", ph.omega23, "2-3 transition frequency, rad/s")->required();
  phys_cmd->add_option("--gamma31", ph.gamma31, "3->1 decay rate, 1/s")->required();
  phys_cmd->add_option("--gamma32", ph.gamma32, "3->2 decay rate, 1/s")->required();
  phys_cmd->add_option("--t0", ph.t0, "reference bath temperature, K")->required();
  phys_cmd->add_option("--t13", ph.t13, "1-3 bath temperature, K (default t0)");
  phys_cmd->add_option("--t23", ph.t23, "2-3 bath temperature, K (default t0)");
  phys_cmd->add_option("--omega-c", ph.omega_c, "coupling Rabi frequency, rad/s");
  phys_cmd->add_option("--convention", ph.convention, "entropy convention")
      ->check(CLI::IsMember({"main", "supplementary"}));
  phys_cmd->add_option("--out", ph.out, "also write the results here");
  common(phys_cmd);

  std::string table;
  auto* check_cmd = app.add_subcommand("export-check", "validate an atomdata v1 table");
  check_cmd->add_option("--table", table, "table file")->required();
  common(check_cmd);

  try {
    auto args = cli::expand_config(std::vector<std::string>(argv, argv + argc));
    args.erase(args.begin());
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return e.kind() == ErrorKind::UsageError ? 2 : 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    std::string meta;
    if (sub == gen_cmd) {
      meta = run_gen(gen);
    } else if (sub == train_cmd) {
      meta = run_train(tr, force);
    } else if (sub == sweep_cmd) {
      meta = run_sweep(sw);
    } else if (sub == predict_cmd) {
      meta = run_predict(pr, force);
    } else if (sub == analyze_cmd) {
      meta = run_analyze(an);
    } else if (sub == fit_cmd) {
      meta = run_fit(fa, force);
    } else if (sub == phys_cmd) {
      meta = run_physics(ph);
    } else {
      const int status = run_export_check(table);
      if (status != 0) return status;
    }
    if (!meta_override.empty()) meta = meta_override;
    if (!meta.empty()) cli::write_meta(meta, sub->get_name(), cli::resolved_options(*sub));
  } catch (const Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return e.kind() == ErrorKind::UsageError ? 2 : 1;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
