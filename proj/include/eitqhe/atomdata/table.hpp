#pragma once

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "eitqhe/atomdata/provider.hpp"
#include "eitqhe/constants.hpp"
#include "eitqhe/csv.hpp"
#include "eitqhe/error.hpp"

// `atomdata v1` text format:
//   # atomdata v1
//   L,Z,A,n,l,j2,energy_hz
//   T,Z,A,n_lo,l_lo,j2_lo,n_up,l_up,j2_up,freq_hz,gamma_s,dipole_si[,comment]
// Further lines starting with '#' and blank lines are ignored.
namespace eitqhe::atomdata {

inline constexpr const char* kAtomTableHeader = "# atomdata v1";

/// Provider that serves exactly the rows of an `atomdata v1` table.
class TableProvider final : public AtomicDataProvider {
 public:
  TableProvider(int z, int a, std::map<LevelQN, double> energies,
                std::map<std::pair<LevelQN, LevelQN>, TransitionRecord> transitions)
      : z_(z), a_(a), energies_(std::move(energies)), transitions_(std::move(transitions)) {}

  SourceTag source() const override { return SourceTag::File; }
  int z() const override { return z_; }
  int a() const override { return a_; }

  std::size_t level_count() const { return energies_.size(); }
  std::size_t transition_count() const { return transitions_.size(); }

  double level_energy(const LevelQN& qn) const override {
    const auto it = energies_.find(qn);
    if (it == energies_.end()) throw Error(ErrorKind::MissingLevel, label(qn));
    return it->second;
  }

  TransitionRecord transition(const LevelQN& lower, const LevelQN& upper) const override {
    const auto it = transitions_.find({lower, upper});
    if (it != transitions_.end()) return it->second;
    if (transitions_.count({upper, lower}) != 0) {
      throw Error(ErrorKind::NotUpward, fmt::format("{} -> {}", label(lower), label(upper)));
    }
    throw Error(ErrorKind::MissingTransition,
                fmt::format("{} -> {}", label(lower), label(upper)));
  }

 private:
  int z_;
  int a_;
  std::map<LevelQN, double> energies_;
  std::map<std::pair<LevelQN, LevelQN>, TransitionRecord> transitions_;
};

namespace detail {

inline LevelQN parse_level(const std::vector<std::string>& f, std::size_t at, std::size_t line) {
  const LevelQN qn{csv::to_int(f[at], line), csv::to_int(f[at + 1], line),
                   csv::to_int(f[at + 2], line)};
  if (!qn.valid()) {
    throw Error(ErrorKind::ParseError,
                fmt::format("line {}: invalid level n={} l={} j2={}", line, qn.n, qn.l, qn.j2));
  }
  return qn;
}

}  // namespace detail

inline std::unique_ptr<TableProvider> read_atomic_table(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw Error(ErrorKind::ParseError, "line 1: missing header");
  ++line_no;
  if (csv::trim(line) != kAtomTableHeader) {
    throw Error(ErrorKind::ParseError, "line 1: expected '# atomdata v1'");
  }
  int z = 0;
  int a = 0;
  bool have_atom = false;
  std::map<LevelQN, double> energies;
  std::map<std::pair<LevelQN, LevelQN>, TransitionRecord> transitions;

  auto check_atom = [&](int rz, int ra) {
    if (!have_atom) {
      z = rz;
      a = ra;
      have_atom = true;
    } else if (rz != z || ra != a) {
      throw Error(ErrorKind::ParseError,
                  fmt::format("line {}: mixed isotopes in one table", line_no));
    }
  };

  while (std::getline(in, line)) {
    ++line_no;
    const auto text = csv::trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto f = csv::split(text);
    if (f[0] == "L") {
      if (f.size() != 7) {
        throw Error(ErrorKind::ParseError, fmt::format("line {}: level row needs 7 fields", line_no));
      }
      check_atom(csv::to_int(f[1], line_no), csv::to_int(f[2], line_no));
      const auto qn = detail::parse_level(f, 3, line_no);
      energies[qn] = csv::to_double(f[6], line_no) * constants::planck;
    } else if (f[0] == "T") {
      if (f.size() != 12 && f.size() != 13) {
        throw Error(ErrorKind::ParseError,
                    fmt::format("line {}: transition row needs 12 fields", line_no));
      }
      check_atom(csv::to_int(f[1], line_no), csv::to_int(f[2], line_no));
      TransitionRecord rec;
      rec.lower = detail::parse_level(f, 3, line_no);
      rec.upper = detail::parse_level(f, 6, line_no);
      rec.omega = 2.0 * constants::pi * csv::to_double(f[9], line_no);
      rec.gamma = csv::to_double(f[10], line_no);
      rec.dipole = csv::to_double(f[11], line_no);
      rec.forbidden = f.size() == 13 && csv::trim(f[12]) == "forbidden";
      if (!(rec.omega > 0.0) || rec.gamma < 0.0 || rec.dipole < 0.0) {
        throw Error(ErrorKind::ParseError,
                    fmt::format("line {}: transition needs omega>0, gamma>=0, dipole>=0", line_no));
      }
      transitions[{rec.lower, rec.upper}] = rec;
    } else {
      throw Error(ErrorKind::ParseError, fmt::format("line {}: unknown row tag '{}'", line_no, f[0]));
    }
  }
  return std::make_unique<TableProvider>(z, a, std::move(energies), std::move(transitions));
}

inline std::unique_ptr<TableProvider> load_atomic_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  return read_atomic_table(in);
}

/// Writes levels and every upward transition among them.
inline void write_atomic_table(std::ostream& out, const AtomicDataProvider& provider,
                               const std::vector<LevelQN>& levels) {
  out << kAtomTableHeader << '\n';
  std::vector<std::pair<LevelQN, double>> present;
  for (const auto& qn : levels) {
    const double e = provider.level_energy(qn);
    present.emplace_back(qn, e);
    out << fmt::format("L,{},{},{},{},{},{}\n", provider.z(), provider.a(), qn.n, qn.l, qn.j2,
                       e / constants::planck);
  }
  for (const auto& [lo, e_lo] : present) {
    for (const auto& [up, e_up] : present) {
      if (!(e_up > e_lo)) continue;
      const auto rec = provider.transition(lo, up);
      out << fmt::format("T,{},{},{},{},{},{},{},{},{},{},{}{}\n", provider.z(),
                         provider.a(), lo.n, lo.l, lo.j2, up.n, up.l, up.j2,
                         rec.omega / (2.0 * constants::pi), rec.gamma, rec.dipole,
                         rec.forbidden ? ",forbidden" : "");
    }
  }
}

struct TableCheckReport {
  bool ok = true;
  std::size_t levels = 0;
  std::size_t transitions = 0;
  std::vector<std::string> problems;
};

/// Format and invariant validation used by `export-check`.
inline TableCheckReport check_atomic_table(std::istream& in) {
  TableCheckReport report;
  std::unique_ptr<TableProvider> table;
  try {
    table = read_atomic_table(in);
  } catch (const Error& e) {
    report.ok = false;
    report.problems.emplace_back(e.what());
    return report;
  }
  report.levels = table->level_count();
  report.transitions = table->transition_count();
  return report;
}

inline TableCheckReport check_atomic_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    TableCheckReport report;
    report.ok = false;
    report.problems.push_back("cannot open " + path);
    return report;
  }
  // Second pass over the raw rows for energy monotonicity in n at fixed (l, j).
  auto report = check_atomic_table(in);
  if (!report.ok) return report;
  in.clear();
  in.seekg(0);
  std::string line;
  std::size_t line_no = 0;
  std::map<std::pair<int, int>, std::map<int, std::pair<double, std::size_t>>> series;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = csv::trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto f = csv::split(text);
    if (f[0] != "L") continue;
    series[{csv::to_int(f[4], line_no), csv::to_int(f[5], line_no)}][csv::to_int(f[3], line_no)] =
        {csv::to_double(f[6], line_no), line_no};
  }
  for (const auto& [key, by_n] : series) {
    double prev = -INFINITY;
    for (const auto& [n, entry] : by_n) {
      if (!(entry.first > prev)) {
        report.ok = false;
        report.problems.push_back(
            fmt::format("line {}: energy not increasing with n (l={}, j2={}, n={})", entry.second,
                        key.first, key.second, n));
      }
      prev = entry.first;
    }
  }
  return report;
}

}  // namespace eitqhe::atomdata
