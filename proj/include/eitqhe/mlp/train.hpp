#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "eitqhe/datagen/dataset.hpp"
#include "eitqhe/error.hpp"
#include "eitqhe/mlp/network.hpp"
#include "eitqhe/rng.hpp"

namespace eitqhe::mlp {

struct DataMatrices {
  Matrix x;  // 9 x N
  Matrix y;  // 6 x N
};

inline DataMatrices to_matrices(const datagen::Dataset& data) {
  DataMatrices d{Matrix(kInputSize, static_cast<Eigen::Index>(data.size())),
                 Matrix(kOutputSize, static_cast<Eigen::Index>(data.size()))};
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    for (int r = 0; r < kInputSize; ++r) d.x(r, c) = data[i].inputs[static_cast<std::size_t>(r)];
    for (int r = 0; r < kOutputSize; ++r) d.y(r, c) = data[i].targets[static_cast<std::size_t>(r)];
  }
  return d;
}

struct TrainOptions {
  int epochs = 100;
  int batch_size = 256;
  double learning_rate = 0.01;
  int patience = 10;            // epochs without val-loss improvement before stopping; 0 disables
  std::uint64_t seed = 0;       // batch order
  double divergence_factor = 1e6;
};

struct EpochMetrics {
  int epoch = 0;
  double train_loss = 0.0;
  double train_mae = 0.0;
  double val_loss = 0.0;
  double val_mae = 0.0;
  double seconds = 0.0;
};

struct TrainHistory {
  std::vector<EpochMetrics> epochs;
  bool early_stopped = false;

  const EpochMetrics& last() const { return epochs.back(); }
};

/// Full-set metrics, evaluated in chunks to bound memory.
inline Metrics evaluate(const MLPModel& model, const DataMatrices& d, Eigen::Index chunk = 4096) {
  const Eigen::Index n = d.x.cols();
  if (n == 0) throw Error(ErrorKind::EmptyDataset, "no rows to evaluate");
  double sq = 0.0, ab = 0.0;
  for (Eigen::Index s = 0; s < n; s += chunk) {
    const Eigen::Index w = std::min(chunk, n - s);
    const Matrix diff = forward(model, Matrix(d.x.middleCols(s, w))) - d.y.middleCols(s, w);
    sq += diff.array().square().sum();
    ab += diff.array().abs().sum();
  }
  const double total = static_cast<double>(n) * kOutputSize;
  return {sq / total, ab / total};
}

/// Mini-batch Adam on the MSE loss. Raises Divergence when a loss turns
/// non-finite or exceeds divergence_factor times the untrained loss.
inline TrainHistory train(MLPModel& model, const DataMatrices& train_set, const DataMatrices& val_set,
                          const TrainOptions& opt) {
  if (train_set.x.cols() == 0 || val_set.x.cols() == 0) {
    throw Error(ErrorKind::EmptyDataset, "train and validation sets must be nonempty");
  }
  if (opt.batch_size < 1 || opt.epochs < 0) throw Error(ErrorKind::InvalidConfig, "batch size/epochs");

  AdamState adam = AdamState::for_model(model, opt.learning_rate);
  const double initial = evaluate(model, train_set).loss;
  const double ceiling = std::max(initial, 1.0) * opt.divergence_factor;
  const Eigen::Index n = train_set.x.cols();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;

  TrainHistory history;
  double best_val = std::numeric_limits<double>::infinity();
  int since_best = 0;
  Matrix bx(kInputSize, opt.batch_size), by(kOutputSize, opt.batch_size);
  for (int epoch = 1; epoch <= opt.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    Rng rng = Rng::stream(opt.seed, static_cast<std::uint64_t>(epoch));
    for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[rng.index(i + 1)]);

    for (Eigen::Index s = 0; s < n; s += opt.batch_size) {
      const Eigen::Index w = std::min<Eigen::Index>(opt.batch_size, n - s);
      bx.resize(kInputSize, w);
      by.resize(kOutputSize, w);
      for (Eigen::Index c = 0; c < w; ++c) {
        const auto src = order[static_cast<std::size_t>(s + c)];
        bx.col(c) = train_set.x.col(src);
        by.col(c) = train_set.y.col(src);
      }
      adam_step(adam, model, backward(model, bx, by));
    }

    EpochMetrics em;
    em.epoch = epoch;
    const auto tr = evaluate(model, train_set);
    const auto va = evaluate(model, val_set);
    em.train_loss = tr.loss;
    em.train_mae = tr.mae;
    em.val_loss = va.loss;
    em.val_mae = va.mae;
    em.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!std::isfinite(tr.loss) || !std::isfinite(va.loss) || tr.loss > ceiling) {
      throw Error(ErrorKind::Divergence,
                  fmt::format("epoch {}: train loss {} (untrained {})", epoch, tr.loss, initial));
    }
    history.epochs.push_back(em);

    if (va.loss < best_val) {
      best_val = va.loss;
      since_best = 0;
    } else if (opt.patience > 0 && ++since_best >= opt.patience) {
      history.early_stopped = true;
      break;
    }
  }
  return history;
}

struct TrainedModel {
  MLPModel model;
  TrainHistory history;
};

/// Split, initialise and train in one call; `opt.seed` drives all three.
inline TrainedModel train_on_dataset(const datagen::Dataset& data, const std::vector<int>& hidden,
                                     Activation activation, const TrainOptions& opt,
                                     double train_fraction = 0.8) {
  const auto split = datagen::split_dataset(data, train_fraction, opt.seed);
  std::vector<int> sizes{kInputSize};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(kOutputSize);
  TrainedModel out{init_network(sizes, activation, opt.seed), {}};
  out.history = train(out.model, to_matrices(split.train), to_matrices(split.validation), opt);
  return out;
}

inline void write_history(std::ostream& os, const TrainHistory& h) {
  os << "epoch,train_loss,train_mae,val_loss,val_mae\n";
  for (const auto& e : h.epochs) {
    os << fmt::format("{},{},{},{},{}\n", e.epoch, e.train_loss, e.train_mae, e.val_loss, e.val_mae);
  }
}

// ---- hyperparameter sweep ---------------------------------------------------

struct SearchSpace {
  std::vector<int> layer_counts{2, 3, 4};
  std::vector<int> widths{32, 64, 128};
  std::vector<double> learning_rates{0.01, 0.1};
  std::vector<Activation> activations{Activation::Relu, Activation::Tanh};
};

struct SweepConfig {
  std::vector<int> hidden;
  double learning_rate = 0.01;
  Activation activation = Activation::Tanh;

  std::string layout() const { return fmt::format("[{}]", fmt::join(hidden, ",")); }

  std::string label() const {
    return fmt::format("{}HL {} lr={} {}", hidden.size(), layout(), learning_rate, to_string(activation));
  }

  std::vector<int> sizes() const {
    std::vector<int> s{kInputSize};
    s.insert(s.end(), hidden.begin(), hidden.end());
    s.push_back(kOutputSize);
    return s;
  }
};

/// FNV-1a over the configuration label: the seed does not move when the space changes.
inline std::uint64_t config_seed(const SweepConfig& c, std::uint64_t base) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : c.label()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(h ^ base);
}

/// Every per-layer width combination for every layer count.
inline std::vector<SweepConfig> enumerate_space(const SearchSpace& space) {
  if (space.layer_counts.empty() || space.widths.empty() || space.learning_rates.empty() ||
      space.activations.empty()) {
    throw Error(ErrorKind::InvalidConfig, "empty search space");
  }
  std::vector<SweepConfig> out;
  for (int layers : space.layer_counts) {
    if (layers < 0) throw Error(ErrorKind::InvalidConfig, "negative layer count");
    std::vector<std::size_t> idx(static_cast<std::size_t>(layers), 0);
    while (true) {
      std::vector<int> hidden;
      for (auto i : idx) hidden.push_back(space.widths[i]);
      for (double lr : space.learning_rates) {
        for (auto act : space.activations) out.push_back({hidden, lr, act});
      }
      std::size_t pos = idx.size();
      while (pos > 0 && ++idx[pos - 1] == space.widths.size()) idx[--pos] = 0;
      if (pos == 0) break;
    }
  }
  return out;
}

struct SweepRow {
  SweepConfig config;
  std::uint64_t seed = 0;
  int epochs_run = 0;
  Metrics train{};
  Metrics val{};
  bool diverged = false;
  std::string error;
  bool best = false;

  double loss_ratio() const { return val.loss / train.loss; }
  double mae_ratio() const { return val.mae / train.mae; }
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::size_t best_index = 0;
  bool two_hidden_lowest_val_mae = false;  // informational
};

struct SweepOptions {
  TrainOptions train;
  std::uint64_t base_seed = 0;
  std::size_t workers = 1;
};

inline SweepRow run_config(const SweepConfig& c, const DataMatrices& tr, const DataMatrices& va,
                           const SweepOptions& opt) {
  SweepRow row;
  row.config = c;
  row.seed = config_seed(c, opt.base_seed);
  auto model = init_network(c.sizes(), c.activation, row.seed);
  TrainOptions to = opt.train;
  to.learning_rate = c.learning_rate;
  to.seed = row.seed;
  try {
    const auto h = train(model, tr, va, to);
    row.epochs_run = static_cast<int>(h.epochs.size());
    if (!h.epochs.empty()) {
      row.train = {h.last().train_loss, h.last().train_mae};
      row.val = {h.last().val_loss, h.last().val_mae};
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Divergence) throw;
    row.diverged = true;
    row.error = e.what();
  }
  return row;
}

/// Runs rows in parallel; each row depends only on its own config and seed.
template <typename Fn>
void parallel_rows(std::size_t count, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

inline SweepResult hyperparameter_sweep(const DataMatrices& tr, const DataMatrices& va,
                                        const std::vector<SweepConfig>& configs,
                                        const SweepOptions& opt) {
  if (configs.empty()) throw Error(ErrorKind::InvalidConfig, "empty search space");
  SweepResult result;
  result.rows.resize(configs.size());
  parallel_rows(configs.size(), opt.workers,
                [&](std::size_t i) { result.rows[i] = run_config(configs[i], tr, va, opt); });

  double best_loss = std::numeric_limits<double>::infinity();
  double best_mae = std::numeric_limits<double>::infinity();
  std::size_t best_mae_index = 0;
  bool any = false;
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const auto& r = result.rows[i];
    if (r.diverged) continue;
    if (!any || r.val.loss < best_loss) {
      best_loss = r.val.loss;
      result.best_index = i;
    }
    if (!any || r.val.mae < best_mae) {
      best_mae = r.val.mae;
      best_mae_index = i;
    }
    any = true;
  }
  if (any) {
    result.rows[result.best_index].best = true;
    result.two_hidden_lowest_val_mae = result.rows[best_mae_index].config.hidden.size() == 2;
  }
  return result;
}

inline void write_sweep(std::ostream& os, const SweepResult& r) {
  os << "hidden_layers,layout,learning_rate,activation,seed,epochs_run,train_loss,train_mae,"
        "val_loss,val_mae,val_train_loss_ratio,val_train_mae_ratio,status,best\n";
  for (const auto& row : r.rows) {
    const auto& c = row.config;
    if (row.diverged) {
      os << fmt::format("{},\"{}\",{},{},{},{},,,,,,,diverged,0\n", c.hidden.size(), c.layout(),
                        c.learning_rate, to_string(c.activation), row.seed, row.epochs_run);
      continue;
    }
    os << fmt::format("{},\"{}\",{},{},{},{},{},{},{},{},{},{},ok,{}\n", c.hidden.size(), c.layout(),
                      c.learning_rate, to_string(c.activation), row.seed, row.epochs_run,
                      row.train.loss, row.train.mae, row.val.loss, row.val.mae, row.loss_ratio(),
                      row.mae_ratio(), row.best ? 1 : 0);
  }
}

// ---- dataset-size study -----------------------------------------------------

struct SizeStudyRow {
  int family = 0;  // hidden-layer count
  std::size_t size = 0;
  SweepRow run;
};

/// For each hidden-layer family, retrains its best sweep configuration on the first
/// `size` records of the shuffled data with an 80/20 split.
inline std::vector<SizeStudyRow> size_study(const datagen::Dataset& shuffled, const SweepResult& sweep,
                                            const std::vector<std::size_t>& sizes,
                                            const SweepOptions& opt, std::uint64_t split_seed) {
  std::map<int, const SweepRow*> best;  // family -> lowest val loss
  for (const auto& row : sweep.rows) {
    if (row.diverged) continue;
    auto& slot = best[static_cast<int>(row.config.hidden.size())];
    if (slot == nullptr || row.val.loss < slot->val.loss) slot = &row;
  }

  std::vector<SizeStudyRow> rows;
  for (auto size : sizes) {
    if (size > shuffled.size() || size < 2) {
      throw Error(ErrorKind::InvalidConfig,
                  fmt::format("study size {} with {} records available", size, shuffled.size()));
    }
  }
  for (const auto& [fam, row] : best) {
    for (auto size : sizes) rows.push_back({fam, size, {}});
  }
  parallel_rows(rows.size(), opt.workers, [&](std::size_t i) {
    auto& row = rows[i];
    const auto& cfg = best.at(row.family)->config;
    const datagen::Dataset subset(shuffled.begin(), shuffled.begin() + static_cast<long>(row.size));
    const auto split = datagen::split_dataset(subset, 0.8, split_seed);
    row.run = run_config(cfg, to_matrices(split.train), to_matrices(split.validation), opt);
  });
  return rows;
}

inline void write_size_study(std::ostream& os, const std::vector<SizeStudyRow>& rows) {
  os << "hidden_layers,size,layout,learning_rate,activation,train_loss,train_mae,val_loss,val_mae,"
        "val_train_loss_ratio,val_train_mae_ratio,status\n";
  for (const auto& r : rows) {
    const auto& c = r.run.config;
    if (r.run.diverged) {
      os << fmt::format("{},{},\"{}\",{},{},,,,,,,diverged\n", r.family, r.size, c.layout(),
                        c.learning_rate, to_string(c.activation));
      continue;
    }
    os << fmt::format("{},{},\"{}\",{},{},{},{},{},{},{},{},ok\n", r.family, r.size, c.layout(),
                      c.learning_rate, to_string(c.activation), r.run.train.loss, r.run.train.mae,
                      r.run.val.loss, r.run.val.mae, r.run.loss_ratio(), r.run.mae_ratio());
  }
}

}  // namespace eitqhe::mlp
