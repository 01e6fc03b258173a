#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "eitqhe/datagen/dataset.hpp"
#include "eitqhe/datagen/generate.hpp"
#include "test_util.hpp"

using namespace eitqhe;
using namespace eitqhe::datagen;
using testutil::kind_of;

namespace {

std::string to_csv(const Dataset& d) {
  std::ostringstream os;
  write_dataset(os, d);
  return os.str();
}

GenerationSpec small_spec(std::size_t count, std::uint64_t seed) {
  GenerationSpec s;
  s.count = count;
  s.seed = seed;
  return s;
}

Dataset numbered(std::size_t n) {
  Dataset d(n);
  for (std::size_t i = 0; i < n; ++i) d[i].inputs[0] = static_cast<double>(i);
  return d;
}

}  // namespace

TEST(GenerationSpec, DefaultsMatchTableOne) {
  const GenerationSpec s;
  EXPECT_NO_THROW(s.validate());
  ASSERT_EQ(s.power_grid.size(), 7u);
  ASSERT_EQ(s.t0_grid.size(), 59u);
  EXPECT_EQ(s.power_grid.front(), 1.0);
  EXPECT_EQ(s.power_grid.back(), 130.0);
  EXPECT_EQ(s.t0_grid.front(), 100.0);
  EXPECT_EQ(s.t0_grid.back(), 6000.0);
  for (std::size_t i = 2; i < s.power_grid.size(); ++i) {
    EXPECT_NEAR(s.power_grid[i] / s.power_grid[i - 1], s.power_grid[1] / s.power_grid[0], 1e-12);
  }
  EXPECT_EQ(s.atoms.size(), 11u);
}

TEST(GenerationSpec, RejectsOutOfTableRanges) {
  GenerationSpec s;
  s.n[0] = {2, 12};
  EXPECT_EQ(kind_of([&] { s.validate(); }), ErrorKind::InvalidConfig);
  s = GenerationSpec{};
  s.l[2] = {1, 12};
  EXPECT_EQ(kind_of([&] { s.validate(); }), ErrorKind::InvalidConfig);
  s = GenerationSpec{};
  s.power_grid.pop_back();
  EXPECT_EQ(kind_of([&] { s.validate(); }), ErrorKind::InvalidConfig);
  s = GenerationSpec{};
  s.t0_grid.push_back(7000.0);
  EXPECT_EQ(kind_of([&] { s.validate(); }), ErrorKind::InvalidConfig);
  s = GenerationSpec{};
  s.atoms = {{37, 86}};
  EXPECT_EQ(kind_of([&] { s.validate(); }), ErrorKind::UnknownIsotope);
}

TEST(SampleLevels, SingletonSupport) {
  GenerationSpec s;
  s.n = {{{3, 3}, {4, 4}, {6, 6}}};
  s.l = {{{1, 1}, {1, 1}, {1, 1}}};
  s.j2 = {{{1, 1}, {1, 1}, {1, 1}}};
  const auto h = atomdata::make_atom(1, 1);
  Rng rng(99);
  for (int i = 0; i < 50; ++i) {
    const auto [a, b, c] = sample_levels(rng, s, h);
    EXPECT_EQ(a, (atomdata::LevelQN{3, 1, 1}));
    EXPECT_EQ(b, (atomdata::LevelQN{4, 1, 1}));
    EXPECT_EQ(c, (atomdata::LevelQN{6, 1, 1}));
  }
}

TEST(SampleLevels, ConstraintsHoldOverManyDraws) {
  const GenerationSpec s;
  Rng rng(1234);
  const auto atoms = {atomdata::make_atom(1, 1), atomdata::make_atom(55, 133), atomdata::make_atom(37, 85)};
  for (const auto& atom : atoms) {
    for (int i = 0; i < 100000 / 3; ++i) {
      const auto [a, b, c] = sample_levels(rng, s, atom);
      ASSERT_TRUE(a.n < b.n && b.n < c.n);
      for (const auto& lv : {a, b, c}) {
        ASSERT_TRUE(lv.valid());
        ASSERT_TRUE(atom.has_level(lv));
        ASSERT_GE(lv.l, 1);
      }
      ASSERT_TRUE(a.n >= 3 && a.n <= 12 && b.n >= 4 && b.n <= 13 && c.n >= 6 && c.n <= 14);
      ASSERT_TRUE(a.l <= 10 && b.l <= 10 && c.l <= 11);
    }
  }
}

TEST(SampleLevels, DeterministicPerSeed) {
  const GenerationSpec s;
  const auto rb = atomdata::make_atom(37, 87);
  Rng r1(5), r2(5);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample_levels(r1, s, rb), sample_levels(r2, s, rb));
}

TEST(SampleLevels, ImpossibleRangesExhaust) {
  GenerationSpec s;
  s.n = {{{12, 12}, {4, 4}, {6, 14}}};
  Rng rng(1);
  EXPECT_EQ(kind_of([&] { sample_levels(rng, s, atomdata::make_atom(1, 1)); }),
            ErrorKind::ExhaustedAttempts);
}

TEST(GenerateDataset, ZeroCount) {
  const auto g = generate_dataset(small_spec(0, 1));
  EXPECT_TRUE(g.records.empty());
  EXPECT_EQ(g.report.candidates, 0u);
  EXPECT_EQ(g.report.rejected_total(), 0u);
}

TEST(GenerateDataset, ExactCountAndValidRecords) {
  const auto g = generate_dataset(small_spec(3000, 17));
  ASSERT_EQ(g.records.size(), 3000u);
  EXPECT_EQ(g.report.accepted, 3000u);
  EXPECT_EQ(g.report.candidates, g.report.accepted + g.report.rejected_total());
  for (const auto& r : g.records) {
    const auto problem = record_problem(r);
    ASSERT_FALSE(problem.has_value()) << *problem;
  }
}

TEST(GenerateDataset, ByteIdenticalAtFixedWorkerCount) {
  for (std::size_t workers : {1u, 3u}) {
    const auto a = generate_dataset(small_spec(1000, 42), builtin_factory(), workers);
    const auto b = generate_dataset(small_spec(1000, 42), builtin_factory(), workers);
    EXPECT_EQ(to_csv(a.records), to_csv(b.records));
    EXPECT_EQ(a.records.size(), 1000u);
  }
  const auto other = generate_dataset(small_spec(1000, 43));
  EXPECT_NE(to_csv(other.records), to_csv(generate_dataset(small_spec(1000, 42)).records));
}

TEST(GenerateDataset, NoCouplingGivesThermalRatios) {
  auto s = small_spec(500, 8);
  s.omega_c_override = 0.0;
  const auto g = generate_dataset(s);
  ASSERT_EQ(g.records.size(), 500u);
  for (const auto& r : g.records) {
    EXPECT_NEAR(r.t_ratio(), 1.0, 1e-9);
    EXPECT_EQ(r.omega_c_s(), 0.0);
  }
}

TEST(GenerateDataset, ReportListsGridsAndTallies) {
  const auto s = small_spec(200, 3);
  const auto g = generate_dataset(s);
  std::ostringstream os;
  write_report(os, s, g.report);
  const auto text = os.str();
  EXPECT_NE(text.find("seed=3\n"), std::string::npos);
  EXPECT_NE(text.find("accepted=200\n"), std::string::npos);
  EXPECT_NE(text.find("power_grid_spacing=log-uniform"), std::string::npos);
  EXPECT_NE(text.find("t0_grid_k=100,"), std::string::npos);
  EXPECT_NE(text.find("providers=1:1:builtin,"), std::string::npos);
}

TEST(Normalize, ReferenceValuesAndRoundTrip) {
  RawInputs raw{3, 1, 1.5, 1e8, 130.0, 5778.0, 2.5, 37, 87};
  const auto s = normalize_inputs(raw);
  EXPECT_EQ(s[3], 1.0);
  EXPECT_EQ(s[4], 1.0);
  EXPECT_EQ(s[5], 1.0);
  EXPECT_EQ(s[0], 3.0);
  EXPECT_EQ(s[6], 2.5);
  EXPECT_EQ(s[7], 37.0);
  raw.omega_c_hz = 3e8;
  EXPECT_DOUBLE_EQ(normalize_inputs(raw)[3], 3.0);

  testutil::Draws draws(4);
  for (int i = 0; i < 1000; ++i) {
    RawInputs r{5, 2, 2.5, draws.log_uniform(1e3, 1e12), draws.uniform(1, 130),
                draws.uniform(100, 6000), 1.3, 55, 133};
    const auto back = denormalize_inputs(normalize_inputs(r));
    EXPECT_LE(std::abs(back.omega_c_hz - r.omega_c_hz), 1e-15 * r.omega_c_hz);
    EXPECT_LE(std::abs(back.power_w - r.power_w), 1e-15 * r.power_w);
    EXPECT_LE(std::abs(back.t0_k - r.t0_k), 1e-15 * r.t0_k);
  }
}

TEST(DatasetCsv, RoundTripAndHeader) {
  const auto g = generate_dataset(small_spec(100, 5));
  std::istringstream in(to_csv(g.records));
  EXPECT_EQ(read_dataset(in), g.records);
  EXPECT_EQ(header_line(), "n1,l1,j1,omega_c_s,power_s,t0_s,t_ratio,z,a,n2,l2,j2,n3,l3,j3");

  std::istringstream bad("n1,l1\n1,2\n");
  EXPECT_EQ(kind_of([&] { read_dataset(bad); }), ErrorKind::ParseError);
  std::istringstream short_row(header_line() + "\n1,2,3\n");
  EXPECT_EQ(kind_of([&] { read_dataset(short_row); }), ErrorKind::ParseError);
}

TEST(SplitDataset, SizesAndDeterminism) {
  auto s = split_dataset(numbered(10), 0.8, 1);
  EXPECT_EQ(s.train.size(), 8u);
  EXPECT_EQ(s.validation.size(), 2u);
  s = split_dataset(numbered(2), 0.5, 1);
  EXPECT_EQ(s.train.size(), 1u);
  EXPECT_EQ(s.validation.size(), 1u);

  const auto a = split_dataset(numbered(1000), 0.8, 77);
  const auto b = split_dataset(numbered(1000), 0.8, 77);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.validation, b.validation);

  std::set<double> seen;
  for (const auto& r : a.train) seen.insert(r.inputs[0]);
  for (const auto& r : a.validation) EXPECT_TRUE(seen.insert(r.inputs[0]).second);
  EXPECT_EQ(seen.size(), 1000u);
}

TEST(SplitDataset, Errors) {
  EXPECT_EQ(kind_of([] { split_dataset({}, 0.8, 1); }), ErrorKind::EmptyDataset);
  EXPECT_EQ(kind_of([] { split_dataset(numbered(3), 1.0, 1); }), ErrorKind::InvalidConfig);
}

TEST(Regime, ThresholdsInclusiveInMid) {
  EXPECT_EQ(regime_label(2.0), Regime::Low);
  EXPECT_EQ(regime_label(2.24), Regime::Mid);
  EXPECT_EQ(regime_label(3.0), Regime::Mid);
  EXPECT_EQ(regime_label(3.5), Regime::High);
  EXPECT_EQ(regime_label(std::nextafter(2.24, 0.0)), Regime::Low);
  EXPECT_EQ(regime_label(std::nextafter(3.0, 4.0)), Regime::High);
  EXPECT_EQ(parse_regime("mid"), Regime::Mid);
  EXPECT_EQ(kind_of([] { parse_regime("medium"); }), ErrorKind::UsageError);
}

TEST(Histogram, ClosureAndRegimeCrossCheck) {
  const auto g = generate_dataset(small_spec(2000, 11));
  const auto n = g.records.size();

  const auto one = histogram(g.records, "power_s", uniform_edges(0.0, 1.0, 1));
  ASSERT_EQ(one.counts.size(), 1u);
  EXPECT_EQ(one.counts[0], n);

  const auto unit = histogram(g.records, "n1", uniform_edges(2.5, 12.5, 10));
  EXPECT_EQ(unit.counts.size(), 10u);
  EXPECT_EQ(unit.total(), n);
  for (std::size_t i = 1; i < unit.edges.size(); ++i) EXPECT_LT(unit.edges[i - 1], unit.edges[i]);

  const auto reg = histogram(g.records, "t_ratio",
                             {0.0, 2.24, std::nextafter(3.0, 4.0), std::numeric_limits<double>::max()});
  std::size_t tally[3] = {0, 0, 0};
  for (const auto& r : g.records) ++tally[static_cast<int>(regime_label(r.t_ratio()))];
  EXPECT_EQ(reg.counts[0], tally[0]);
  EXPECT_EQ(reg.counts[1], tally[1]);
  EXPECT_EQ(reg.counts[2], tally[2]);
  EXPECT_EQ(tally[0] + tally[1] + tally[2], n);

  for (const auto& col : kColumns) EXPECT_EQ(histogram(g.records, col, uniform_edges(0, 1, 4)).total(), n);
  EXPECT_EQ(kind_of([&] { histogram(g.records, "n4", uniform_edges(0, 1, 2)); }), ErrorKind::UnknownColumn);
}

TEST(Histogram, CsvEmission) {
  Dataset d = numbered(4);
  std::ostringstream os;
  write_histogram(os, histogram(d, "n1", uniform_edges(0.0, 4.0, 2)));
  EXPECT_EQ(os.str(), "lo,hi,count\n0,2,2\n2,4,2\n");
}
