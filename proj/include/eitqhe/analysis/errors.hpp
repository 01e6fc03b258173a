#pragma once

#include <array>
#include <cmath>
#include <ostream>
#include <vector>

#include <fmt/format.h>

#include "eitqhe/analysis/predictions.hpp"
#include "eitqhe/error.hpp"

namespace eitqhe::analysis {

/// Error histogram with bins of `width` centred on multiples of `width`.
struct ErrorHistogram {
  double width = 1.0;
  long first = 0;  // centre of bin 0 is first * width
  std::vector<std::size_t> counts;

  double centre(std::size_t i) const { return static_cast<double>(first + static_cast<long>(i)) * width; }

  std::size_t mode_index() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < counts.size(); ++i) {
      if (counts[i] > counts[best]) best = i;
    }
    return best;
  }
  double mode() const { return centre(mode_index()); }
};

/// Bin index k for error e is round(e / width); ties go away from zero.
inline ErrorHistogram error_histogram(const std::vector<double>& errors, double width) {
  ErrorHistogram h;
  h.width = width;
  if (errors.empty()) return h;
  std::vector<long> idx(errors.size());
  long lo = 0, hi = 0;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!std::isfinite(errors[i])) throw Error(ErrorKind::NonFiniteInput, fmt::format("error {}", i));
    idx[i] = std::lround(errors[i] / width);
    if (i == 0 || idx[i] < lo) lo = idx[i];
    if (i == 0 || idx[i] > hi) hi = idx[i];
  }
  h.first = lo;
  h.counts.assign(static_cast<std::size_t>(hi - lo + 1), 0);
  for (long k : idx) ++h.counts[static_cast<std::size_t>(k - lo)];
  return h;
}

struct ErrorReport {
  std::vector<std::array<double, 6>> actual;
  std::vector<std::array<double, 6>> predicted;
  std::array<ErrorHistogram, 6> histograms;

  std::array<double, 6> modes() const {
    std::array<double, 6> m{};
    for (std::size_t c = 0; c < 6; ++c) m[c] = histograms[c].mode();
    return m;
  }
};

/// Bin width per target component: unit for n and l, one half for j.
inline constexpr std::array<double, 6> kErrorBinWidths{1.0, 1.0, 0.5, 1.0, 1.0, 0.5};

inline ErrorReport prediction_error_report(const std::vector<std::array<double, 6>>& actual,
                                           const std::vector<std::array<double, 6>>& predicted) {
  if (actual.size() != predicted.size()) {
    throw Error(ErrorKind::ShapeMismatch, fmt::format("{} targets, {} predictions", actual.size(), predicted.size()));
  }
  ErrorReport r{actual, predicted, {}};
  for (std::size_t c = 0; c < 6; ++c) {
    std::vector<double> e(actual.size());
    for (std::size_t i = 0; i < actual.size(); ++i) e[i] = predicted[i][c] - actual[i][c];
    r.histograms[c] = error_histogram(e, kErrorBinWidths[c]);
  }
  return r;
}

/// Report over raw outputs of a prediction file that carries true targets.
inline ErrorReport prediction_error_report(const std::vector<PredictionRecord>& preds) {
  std::vector<std::array<double, 6>> actual, raw;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (!preds[i].actual) throw Error(ErrorKind::ShapeMismatch, fmt::format("record {} has no targets", i));
    actual.push_back(*preds[i].actual);
    raw.push_back(preds[i].raw);
  }
  return prediction_error_report(actual, raw);
}

inline void write_scatter(std::ostream& os, const ErrorReport& r) {
  for (std::size_t c = 0; c < 6; ++c) os << fmt::format("{}{}_true,{}_pred", c ? "," : "", kTargetNames[c], kTargetNames[c]);
  os << '\n';
  for (std::size_t i = 0; i < r.actual.size(); ++i) {
    for (std::size_t c = 0; c < 6; ++c) os << fmt::format("{}{},{}", c ? "," : "", r.actual[i][c], r.predicted[i][c]);
    os << '\n';
  }
}

inline void write_error_histogram(std::ostream& os, const ErrorHistogram& h) {
  os << "bin_centre,bin_lo,bin_hi,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    const double c = h.centre(i);
    os << fmt::format("{},{},{},{}\n", c, c - 0.5 * h.width, c + 0.5 * h.width, h.counts[i]);
  }
}

}  // namespace eitqhe::analysis
