#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eitqhe {

enum class ErrorKind {
  UnknownIsotope,
  ParseError,
  MissingLevel,
  MissingTransition,
  NotUpward,
  InvalidLevel,
  InvalidConfig,
  NonPositiveInput,
  DegenerateSystem,
  SingularDenominator,
  GainThreshold,
  GainRegime,
  NonPositiveBrightness,
  InvalidFrequencies,
  ExhaustedAttempts,
  EmptyDataset,
  UnknownColumn,
  BadShape,
  NonFiniteInput,
  ShapeMismatch,
  Divergence,
  VersionMismatch,
  IllConditioned,
  UsageError,
  IoError,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnknownIsotope: return "UnknownIsotope";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::MissingLevel: return "MissingLevel";
    case ErrorKind::MissingTransition: return "MissingTransition";
    case ErrorKind::NotUpward: return "NotUpward";
    case ErrorKind::InvalidLevel: return "InvalidLevel";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::NonPositiveInput: return "NonPositiveInput";
    case ErrorKind::DegenerateSystem: return "DegenerateSystem";
    case ErrorKind::SingularDenominator: return "SingularDenominator";
    case ErrorKind::GainThreshold: return "GainThreshold";
    case ErrorKind::GainRegime: return "GainRegime";
    case ErrorKind::NonPositiveBrightness: return "NonPositiveBrightness";
    case ErrorKind::InvalidFrequencies: return "InvalidFrequencies";
    case ErrorKind::ExhaustedAttempts: return "ExhaustedAttempts";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::UnknownColumn: return "UnknownColumn";
    case ErrorKind::BadShape: return "BadShape";
    case ErrorKind::NonFiniteInput: return "NonFiniteInput";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::Divergence: return "Divergence";
    case ErrorKind::VersionMismatch: return "VersionMismatch";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::UsageError: return "UsageError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every library failure carries a machine-checkable kind next to the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace eitqhe
