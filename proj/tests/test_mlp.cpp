#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "eitqhe/mlp/model_io.hpp"
#include "eitqhe/mlp/network.hpp"
#include "eitqhe/mlp/predict.hpp"
#include "eitqhe/mlp/train.hpp"
#include "test_util.hpp"

using namespace eitqhe;
using namespace eitqhe::mlp;
using testutil::kind_of;

namespace {

// Straightforward scalar re-implementations used as oracles.
namespace naive {

std::vector<double> forward(const MLPModel& m, const std::vector<double>& x) {
  std::vector<double> a = x;
  for (std::size_t k = 0; k < m.layers(); ++k) {
    const auto& w = m.weights[k];
    std::vector<double> z(static_cast<std::size_t>(w.rows()));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      double s = m.biases[k](r);
      for (Eigen::Index c = 0; c < w.cols(); ++c) s += w(r, c) * a[static_cast<std::size_t>(c)];
      if (k + 1 < m.layers()) s = m.activation == Activation::Tanh ? std::tanh(s) : (s > 0 ? s : 0.0);
      z[static_cast<std::size_t>(r)] = s;
    }
    a = z;
  }
  return a;
}

Metrics loss_and_mae(const Matrix& p, const Matrix& t) {
  double sq = 0, ab = 0;
  for (Eigen::Index r = 0; r < p.rows(); ++r) {
    for (Eigen::Index c = 0; c < p.cols(); ++c) {
      const double d = p(r, c) - t(r, c);
      sq += d * d;
      ab += std::abs(d);
    }
  }
  const double n = static_cast<double>(p.size());
  return {sq / n, ab / n};
}

void adam(std::vector<double>& theta, const std::vector<double>& g, std::vector<double>& m,
          std::vector<double>& v, int t, double lr) {
  for (std::size_t i = 0; i < theta.size(); ++i) {
    m[i] = 0.9 * m[i] + 0.1 * g[i];
    v[i] = 0.999 * v[i] + 0.001 * g[i] * g[i];
    const double mh = m[i] / (1.0 - std::pow(0.9, t));
    const double vh = v[i] / (1.0 - std::pow(0.999, t));
    theta[i] -= lr * mh / (std::sqrt(vh) + 1e-8);
  }
}

}  // namespace naive

std::vector<double> flatten(const MLPModel& m) {
  std::vector<double> out;
  for (std::size_t k = 0; k < m.layers(); ++k) {
    for (Eigen::Index c = 0; c < m.weights[k].cols(); ++c) {
      for (Eigen::Index r = 0; r < m.weights[k].rows(); ++r) out.push_back(m.weights[k](r, c));
    }
    for (Eigen::Index r = 0; r < m.biases[k].size(); ++r) out.push_back(m.biases[k](r));
  }
  return out;
}

std::vector<double> flatten(const Gradients& g) {
  std::vector<double> out;
  for (std::size_t k = 0; k < g.weights.size(); ++k) {
    for (Eigen::Index c = 0; c < g.weights[k].cols(); ++c) {
      for (Eigen::Index r = 0; r < g.weights[k].rows(); ++r) out.push_back(g.weights[k](r, c));
    }
    for (Eigen::Index r = 0; r < g.biases[k].size(); ++r) out.push_back(g.biases[k](r));
  }
  return out;
}

double& parameter(MLPModel& m, std::size_t index) {
  for (std::size_t k = 0; k < m.layers(); ++k) {
    const auto nw = static_cast<std::size_t>(m.weights[k].size());
    if (index < nw) return m.weights[k].data()[index];
    index -= nw;
    const auto nb = static_cast<std::size_t>(m.biases[k].size());
    if (index < nb) return m.biases[k].data()[index];
    index -= nb;
  }
  throw std::out_of_range("parameter index");
}

Matrix random_matrix(testutil::Draws& d, Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = d.uniform(-scale, scale);
  return m;
}

MLPModel random_model(testutil::Draws& d, Activation act) {
  std::vector<int> sizes{kInputSize};
  const int hidden = d.integer(0, 3);
  for (int h = 0; h < hidden; ++h) sizes.push_back(d.integer(1, 12));
  sizes.push_back(kOutputSize);
  auto m = init_network(sizes, act, d.engine()());
  for (auto& b : m.biases) b = Vector::Random(b.size()) * 0.3;
  return m;
}

}  // namespace

TEST(InitNetwork, ShapesAndDeterminism) {
  const auto m = init_network({9, 128, 128, 6}, Activation::Tanh, 7);
  ASSERT_EQ(m.layers(), 3u);
  EXPECT_EQ(m.weights[0].rows(), 128);
  EXPECT_EQ(m.weights[0].cols(), 9);
  EXPECT_EQ(m.weights[1].rows(), 128);
  EXPECT_EQ(m.weights[1].cols(), 128);
  EXPECT_EQ(m.weights[2].rows(), 6);
  EXPECT_EQ(m.weights[2].cols(), 128);
  for (std::size_t k = 0; k < m.layers(); ++k) {
    const double limit = std::sqrt(6.0 / (m.weights[k].rows() + m.weights[k].cols()));
    EXPECT_LE(m.weights[k].cwiseAbs().maxCoeff(), limit);
    EXPECT_GT(m.weights[k].cwiseAbs().maxCoeff(), 0.9 * limit);
    EXPECT_TRUE(m.biases[k].isZero());
  }
  EXPECT_EQ(flatten(m), flatten(init_network({9, 128, 128, 6}, Activation::Tanh, 7)));
  EXPECT_NE(flatten(m), flatten(init_network({9, 128, 128, 6}, Activation::Tanh, 8)));

  const auto linear = init_network({9, 6}, Activation::Relu, 1);
  EXPECT_EQ(linear.layers(), 1u);
  EXPECT_EQ(kind_of([] { init_network({8, 6}, Activation::Tanh, 1); }), ErrorKind::BadShape);
  EXPECT_EQ(kind_of([] { init_network({9, 4, 5}, Activation::Tanh, 1); }), ErrorKind::BadShape);
  EXPECT_EQ(kind_of([] { init_network({9, 0, 6}, Activation::Tanh, 1); }), ErrorKind::BadShape);
}

TEST(Forward, ZeroWeightsGiveBiases) {
  auto m = init_network({9, 16, 6}, Activation::Tanh, 1);
  for (auto& w : m.weights) w.setZero();
  m.biases[1] << 1, 2, 3, 4, 5, 6;
  const Vector y = forward(m, Vector(Vector::Constant(9, 0.7)));
  for (int i = 0; i < 6; ++i) EXPECT_EQ(y(i), i + 1.0);
}

TEST(Forward, HiddenTanhSaturates) {
  auto m = init_network({9, 1, 6}, Activation::Tanh, 1);
  m.weights[0].setZero();
  m.biases[0](0) = 50.0;
  m.weights[1].setOnes();
  const auto acts = forward_all(m, Matrix::Constant(9, 1, 3.0));
  EXPECT_LE(acts[1](0, 0), 1.0);
  EXPECT_NEAR(acts[1](0, 0), 1.0, 1e-15);
  m.biases[0](0) = -50.0;
  EXPECT_GE(forward_all(m, Matrix::Constant(9, 1, 3.0))[1](0, 0), -1.0);
}

TEST(Forward, MatchesNaiveImplementation) {
  testutil::Draws d(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto act = trial % 2 ? Activation::Tanh : Activation::Relu;
    const auto m = random_model(d, act);
    const Matrix x = random_matrix(d, 9, 5, 2.0);
    const Matrix y = forward(m, x);
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      std::vector<double> xc(x.col(c).data(), x.col(c).data() + 9);
      const auto ref = naive::forward(m, xc);
      for (int r = 0; r < 6; ++r) ASSERT_NEAR(y(r, c), ref[static_cast<std::size_t>(r)], 1e-12);
    }
  }
}

TEST(Forward, RejectsNonFiniteAndBadShape) {
  const auto m = init_network({9, 4, 6}, Activation::Tanh, 1);
  Matrix x = Matrix::Zero(9, 2);
  x(3, 1) = std::nan("");
  EXPECT_EQ(kind_of([&] { forward(m, x); }), ErrorKind::NonFiniteInput);
  EXPECT_EQ(kind_of([&] { forward(m, Matrix(Matrix::Zero(8, 2))); }), ErrorKind::ShapeMismatch);
}

TEST(LossAndMae, DefinitionsAndNaiveOracle) {
  Matrix p = Matrix::Constant(6, 3, 1.5);
  auto r = loss_and_mae(p, p);
  EXPECT_EQ(r.loss, 0.0);
  EXPECT_EQ(r.mae, 0.0);

  Matrix a(1, 1), b(1, 1);
  a << 3.0;
  b << 1.0;
  r = loss_and_mae(a, b);
  EXPECT_EQ(r.loss, 4.0);
  EXPECT_EQ(r.mae, 2.0);

  Matrix e(1, 2), z = Matrix::Zero(1, 2);
  e << 1.0, -1.0;
  r = loss_and_mae(e, z);
  EXPECT_EQ(r.loss, 1.0);
  EXPECT_EQ(r.mae, 1.0);

  testutil::Draws d(9);
  for (int i = 0; i < 100; ++i) {
    const Matrix x = random_matrix(d, 6, d.integer(1, 40), 5.0);
    const Matrix y = random_matrix(d, 6, x.cols(), 5.0);
    const auto fast = loss_and_mae(x, y);
    const auto ref = naive::loss_and_mae(x, y);
    EXPECT_NEAR(fast.loss, ref.loss, 1e-12);
    EXPECT_NEAR(fast.mae, ref.mae, 1e-12);
  }
  EXPECT_EQ(kind_of([] { loss_and_mae(Matrix::Zero(6, 2), Matrix::Zero(6, 3)); }), ErrorKind::ShapeMismatch);
}

TEST(Backward, ZeroErrorGivesZeroGradient) {
  testutil::Draws d(5);
  const auto m = random_model(d, Activation::Tanh);
  const Matrix x = random_matrix(d, 9, 7);
  const auto g = backward(m, x, forward(m, x));
  for (double v : flatten(g)) EXPECT_EQ(v, 0.0);
}

TEST(Backward, LinearNetworkClosedForm) {
  testutil::Draws d(6);
  auto m = init_network({9, 6}, Activation::Tanh, 2);
  m.biases[0] = Vector::Random(6);
  const Matrix x = random_matrix(d, 9, 13);
  const Matrix y = random_matrix(d, 6, 13);
  const auto g = backward(m, x, y);
  const Matrix resid = (m.weights[0] * x).colwise() + m.biases[0] - y;
  const double n = static_cast<double>(y.size());
  const Matrix dw = 2.0 * resid * x.transpose() / n;
  const Vector db = 2.0 * resid.rowwise().sum() / n;
  EXPECT_LT((g.weights[0] - dw).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((g.biases[0] - db).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Backward, MatchesCentralDifferences) {
  testutil::Draws d(2024);
  const double h = 1e-5;
  double worst = 0.0;
  for (int trial = 0; trial < 300; ++trial) {
    auto m = random_model(d, trial % 2 ? Activation::Tanh : Activation::Relu);
    const Matrix x = random_matrix(d, 9, d.integer(1, 8), 1.7);
    const Matrix y = random_matrix(d, 6, x.cols(), 2.0);
    const auto g = flatten(backward(m, x, y));
    for (std::size_t p = 0; p < g.size(); ++p) {
      double& theta = parameter(m, p);
      const double saved = theta;
      theta = saved + h;
      const double up = loss_and_mae(forward(m, x), y).loss;
      theta = saved - h;
      const double down = loss_and_mae(forward(m, x), y).loss;
      theta = saved;
      const double fd = (up - down) / (2.0 * h);
      const double err = std::abs(fd - g[p]) / std::max({std::abs(fd), std::abs(g[p]), 1e-6});
      worst = std::max(worst, err);
    }
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(Adam, FirstStepIsSignTimesRate) {
  auto m = init_network({9, 6}, Activation::Tanh, 1);
  m.weights[0].setZero();
  auto g = Gradients::zeros_like(m);
  g.weights[0].setConstant(0.5);
  g.biases[0].setConstant(0.5);
  auto s = AdamState::for_model(m, 0.01);
  adam_step(s, m, g);
  EXPECT_EQ(s.t, 1);
  EXPECT_NEAR(m.weights[0](2, 3), -0.01, 1e-9);
  EXPECT_NEAR(m.biases[0](0), -0.01, 1e-9);
}

TEST(Adam, ZeroGradientIsIdentityAndMomentsDecay) {
  testutil::Draws d(8);
  auto fresh = random_model(d, Activation::Relu);
  auto fs = AdamState::for_model(fresh, 0.05);
  const auto p0 = flatten(fresh);
  for (int i = 0; i < 10; ++i) adam_step(fs, fresh, Gradients::zeros_like(fresh));
  EXPECT_EQ(flatten(fresh), p0);

  auto m = random_model(d, Activation::Tanh);
  auto s = AdamState::for_model(m, 0.05);
  const Matrix x = random_matrix(d, 9, 4);
  adam_step(s, m, backward(m, x, random_matrix(d, 6, 4)));
  auto m_prev = flatten(s.m);
  auto v_prev = flatten(s.v);
  for (int i = 0; i < 5; ++i) {
    adam_step(s, m, Gradients::zeros_like(m));
    const auto mi = flatten(s.m);
    const auto vi = flatten(s.v);
    for (std::size_t k = 0; k < mi.size(); ++k) {
      ASSERT_LE(std::abs(mi[k]), std::abs(m_prev[k]));
      ASSERT_LE(vi[k], v_prev[k]);
      ASSERT_GE(vi[k], 0.0);
    }
    m_prev = mi;
    v_prev = vi;
  }
}

TEST(Adam, MatchesNaiveUpdate) {
  testutil::Draws d(12);
  for (int trial = 0; trial < 20; ++trial) {
    auto m = random_model(d, Activation::Tanh);
    auto s = AdamState::for_model(m, 0.01 * (1 + trial % 3));
    auto theta = flatten(m);
    std::vector<double> mm(theta.size(), 0.0), vv(theta.size(), 0.0);
    for (int step = 1; step <= 5; ++step) {
      auto g = Gradients::zeros_like(m);
      for (auto& w : g.weights) w = Matrix::Random(w.rows(), w.cols());
      for (auto& b : g.biases) b = Vector::Random(b.size());
      adam_step(s, m, g);
      naive::adam(theta, flatten(g), mm, vv, step, s.learning_rate);
      const auto got = flatten(m);
      for (std::size_t i = 0; i < got.size(); ++i) ASSERT_NEAR(got[i], theta[i], 1e-12);
    }
  }
  auto m = init_network({9, 6}, Activation::Tanh, 1);
  auto s = AdamState::for_model(m, 0.01);
  const auto other = Gradients::zeros_like(init_network({9, 3, 6}, Activation::Tanh, 1));
  EXPECT_EQ(kind_of([&] { adam_step(s, m, other); }), ErrorKind::ShapeMismatch);
}

namespace {

DataMatrices linear_task(testutil::Draws& d, const Matrix& a, Eigen::Index n) {
  DataMatrices s{random_matrix(d, 9, n), {}};
  s.y = a * s.x;
  return s;
}

}  // namespace

TEST(Train, ZeroTargetIsLearned) {
  testutil::Draws d(31);
  DataMatrices tr{random_matrix(d, 9, 100), Matrix::Zero(6, 100)};
  DataMatrices va{random_matrix(d, 9, 20), Matrix::Zero(6, 20)};
  auto m = init_network({9, 6}, Activation::Tanh, 4);
  TrainOptions o;
  o.epochs = 200;
  o.batch_size = 100;
  o.learning_rate = 0.01;
  o.patience = 0;
  const auto h = train(m, tr, va, o);
  ASSERT_EQ(h.epochs.size(), 200u);
  EXPECT_LT(h.last().train_loss, 1e-6);
  for (std::size_t i = 1; i < h.epochs.size(); ++i) {
    EXPECT_LE(h.epochs[i].train_loss, h.epochs[i - 1].train_loss) << "epoch " << i + 1;
  }
}

TEST(Train, NoiselessLinearMap) {
  testutil::Draws d(32);
  const Matrix a = random_matrix(d, 6, 9);
  const auto tr = linear_task(d, a, 400);
  const auto va = linear_task(d, a, 100);
  auto m = init_network({9, 6}, Activation::Tanh, 5);
  TrainOptions o;
  o.epochs = 1500;
  o.batch_size = 400;
  o.learning_rate = 0.01;
  o.patience = 0;
  const auto h = train(m, tr, va, o);
  EXPECT_LT(h.last().val_loss, 1e-8);
  for (std::size_t i = 1; i < h.epochs.size(); ++i) {
    // 1e-20 absorbs jitter once the loss sits at round-off level
    ASSERT_LE(h.epochs[i].train_loss, h.epochs[i - 1].train_loss + 1e-20) << "epoch " << i + 1;
  }
}

TEST(Train, LargeStepDivergesLoudly) {
  testutil::Draws d(33);
  DataMatrices tr{random_matrix(d, 9, 512), random_matrix(d, 6, 512)};
  DataMatrices va{random_matrix(d, 9, 64), random_matrix(d, 6, 64)};
  auto m = init_network({9, 64, 64, 6}, Activation::Relu, 6);
  TrainOptions o;
  o.epochs = 50;
  o.learning_rate = 10.0;
  o.batch_size = 32;
  EXPECT_EQ(kind_of([&] { train(m, tr, va, o); }), ErrorKind::Divergence);
}

TEST(Train, DeterministicPerSeed) {
  testutil::Draws d(34);
  DataMatrices tr{random_matrix(d, 9, 300), random_matrix(d, 6, 300)};
  DataMatrices va{random_matrix(d, 9, 50), random_matrix(d, 6, 50)};
  TrainOptions o;
  o.epochs = 5;
  o.batch_size = 64;
  o.seed = 99;
  auto m1 = init_network({9, 8, 6}, Activation::Tanh, 1);
  auto m2 = init_network({9, 8, 6}, Activation::Tanh, 1);
  const auto h1 = train(m1, tr, va, o);
  const auto h2 = train(m2, tr, va, o);
  for (std::size_t i = 0; i < h1.epochs.size(); ++i) {
    EXPECT_EQ(h1.epochs[i].train_loss, h2.epochs[i].train_loss);
    EXPECT_EQ(h1.epochs[i].val_mae, h2.epochs[i].val_mae);
  }
  EXPECT_EQ(flatten(m1), flatten(m2));
  std::ostringstream os;
  write_history(os, h1);
  EXPECT_EQ(os.str().substr(0, 41), "epoch,train_loss,train_mae,val_loss,val_m");
}

TEST(Train, EarlyStopOnPlateau) {
  testutil::Draws d(35);
  DataMatrices tr{random_matrix(d, 9, 200), random_matrix(d, 6, 200)};
  DataMatrices va{random_matrix(d, 9, 200), random_matrix(d, 6, 200)};  // unrelated targets
  auto m = init_network({9, 32, 6}, Activation::Tanh, 2);
  TrainOptions o;
  o.epochs = 500;
  o.batch_size = 50;
  o.patience = 10;
  const auto h = train(m, tr, va, o);
  EXPECT_TRUE(h.early_stopped);
  EXPECT_LT(h.epochs.size(), 500u);
}

TEST(Sweep, TableTwoSpaceEnumeration) {
  const auto configs = enumerate_space(SearchSpace{});
  EXPECT_EQ(configs.size(), (9u + 27u + 81u) * 4u);
  bool found = false;
  for (const auto& c : configs) {
    if (c.hidden == std::vector<int>{128, 128} && c.learning_rate == 0.01 &&
        c.activation == Activation::Tanh) {
      found = true;
      EXPECT_EQ(c.sizes(), (std::vector<int>{9, 128, 128, 6}));
    }
  }
  EXPECT_TRUE(found);
  SweepConfig c{{32, 128, 32}, 0.01, Activation::Relu};
  EXPECT_EQ(config_seed(c, 1), config_seed(c, 1));
  EXPECT_NE(config_seed(c, 1), config_seed(c, 2));
}

TEST(Sweep, SingleConfigAndDivergenceRecorded) {
  testutil::Draws d(36);
  const Matrix a = random_matrix(d, 6, 9);
  const auto tr = linear_task(d, a, 300);
  const auto va = linear_task(d, a, 60);
  SweepOptions opt;
  opt.train.epochs = 3;
  opt.train.batch_size = 32;
  auto one = hyperparameter_sweep(tr, va, {{{8}, 0.01, Activation::Tanh}}, opt);
  ASSERT_EQ(one.rows.size(), 1u);
  EXPECT_TRUE(one.rows[0].best);

  opt.train.epochs = 20;
  const std::vector<SweepConfig> mixed{{{64, 64}, 10.0, Activation::Relu}, {{8, 8}, 0.01, Activation::Tanh}};
  const auto r = hyperparameter_sweep(tr, va, mixed, opt);
  EXPECT_TRUE(r.rows[0].diverged);
  EXPECT_FALSE(r.rows[1].diverged);
  EXPECT_EQ(r.best_index, 1u);
  EXPECT_TRUE(r.two_hidden_lowest_val_mae);
  std::ostringstream os;
  write_sweep(os, r);
  EXPECT_NE(os.str().find("diverged"), std::string::npos);
  EXPECT_NE(os.str().find("val_train_mae_ratio"), std::string::npos);

  opt.workers = 2;
  const auto par = hyperparameter_sweep(tr, va, mixed, opt);
  EXPECT_EQ(par.rows[1].val.loss, r.rows[1].val.loss);
}

TEST(Sweep, SizeStudyRatiosRecomputed) {
  datagen::Dataset data(1200);
  testutil::Draws d(37);
  for (auto& r : data) {
    for (auto& v : r.inputs) v = d.uniform(-1, 1);
    for (std::size_t k = 0; k < 6; ++k) r.targets[k] = r.inputs[k] + 0.5 * r.inputs[k + 1];
  }
  const auto split = datagen::split_dataset(data, 0.8, 1);
  SweepOptions opt;
  opt.train.epochs = 2;
  const auto sweep = hyperparameter_sweep(
      to_matrices(split.train), to_matrices(split.validation),
      {{{8, 8}, 0.01, Activation::Tanh}, {{8, 8, 8}, 0.01, Activation::Relu}}, opt);
  const auto rows = size_study(data, sweep, {100, 1000}, opt, 5);
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& row : rows) {
    EXPECT_DOUBLE_EQ(row.run.loss_ratio(), row.run.val.loss / row.run.train.loss);
    EXPECT_DOUBLE_EQ(row.run.mae_ratio(), row.run.val.mae / row.run.train.mae);
  }
  EXPECT_EQ(rows[0].family, 2);
  EXPECT_EQ(rows[3].family, 3);
  EXPECT_EQ(kind_of([&] { size_study(data, sweep, {5000}, opt, 5); }), ErrorKind::InvalidConfig);
}

TEST(PredictStates, RoundingRules) {
  auto p = round_states({7.2, 3.9, 4.4, 10.8, 3.1, 3.6});
  EXPECT_EQ(p.rounded, (std::array<double, 6>{7, 4, 4.5, 11, 3, 3.5}));
  EXPECT_EQ(p.raw[0], 7.2);

  const std::array<double, 6> exact{5, 2, 2.5, 9, 4, 3.5};
  EXPECT_EQ(round_states(exact).rounded, exact);

  p = round_states({99, 3, 3.5, 8, 2, 1.5});
  EXPECT_EQ(p.rounded[0], 13);
  p = round_states({-4, 40, -3, 100, 0, 0});
  EXPECT_EQ(p.rounded[0], 4);
  EXPECT_EQ(p.rounded[1], 3);  // fixed below n first
  EXPECT_EQ(p.rounded[2], 2.5);
  EXPECT_EQ(p.rounded[3], 14);
  EXPECT_EQ(p.rounded[4], 1);
  EXPECT_EQ(p.rounded[5], 0.5);
}

TEST(PredictStates, AlwaysValidLevels) {
  testutil::Draws d(40);
  for (int i = 0; i < 20000; ++i) {
    std::array<double, 6> raw{};
    for (auto& v : raw) v = d.uniform(-20, 40);
    const auto p = round_states(raw);
    const auto a = p.level2(), b = p.level3();
    ASSERT_TRUE(a.valid() && b.valid());
    ASSERT_TRUE(a.n >= 4 && a.n <= 13 && a.l >= 1 && a.l <= 10);
    ASSERT_TRUE(b.n >= 6 && b.n <= 14 && b.l >= 1 && b.l <= 11);
  }
  const auto m = init_network({9, 8, 6}, Activation::Tanh, 1);
  const auto q = predict_states(m, {3, 1, 1.5, 1, 1, 1, 1, 37, 87});
  EXPECT_TRUE(q.level2().valid());
}

TEST(ModelIo, RoundTripAndErrors) {
  testutil::Draws d(41);
  const auto m = init_network({9, 17, 5, 6}, Activation::Relu, 123);
  std::stringstream ss;
  save_model(ss, m);
  const std::string text = ss.str();
  EXPECT_EQ(text.substr(0, 12), "mlpmodel v1\n");
  const auto back = load_model(ss);
  EXPECT_EQ(back.layer_sizes, m.layer_sizes);
  EXPECT_EQ(back.activation, m.activation);
  EXPECT_EQ(back.seed, 123u);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Matrix x = random_matrix(d, 9, 1, 3.0);
    worst = std::max(worst, (forward(m, x) - forward(back, x)).cwiseAbs().maxCoeff());
  }
  EXPECT_LT(worst, 1e-12);

  std::istringstream truncated(text.substr(0, text.size() / 2));
  EXPECT_EQ(kind_of([&] { load_model(truncated); }), ErrorKind::ParseError);
  std::istringstream old("mlpmodel v0\n" + text.substr(12));
  EXPECT_EQ(kind_of([&] { load_model(old); }), ErrorKind::VersionMismatch);
  std::istringstream junk("hello\n");
  EXPECT_EQ(kind_of([&] { load_model(junk); }), ErrorKind::ParseError);
}
