#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gal {

enum class ErrorKind {
  // ingestion
  MalformedHeader,
  RaggedRow,
  NonNumericCell,
  LengthMismatch,
  NonBinaryCell,
  WrongEventColumns,
  IndexOutOfRange,
  InvalidArgument,
  Io,
  // dsp
  EmptyInput,
  TooShortForLevels,
  InconsistentLengths,
  InvalidCutoff,
  DegenerateChannel,
  ChannelMismatch,
  // windowing
  RecordingTooShort,
  InsufficientSeries,
  // models
  ShapeMismatch,
  NonFinite,
  BatchTooSmall,
  EmptyTrainingSet,
  NonFiniteLoss,
  // eval
  SingleClass,
  AllSingleClass,
  // cli
  Config,
  CheckpointMismatch,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedHeader: return "MalformedHeader";
    case ErrorKind::RaggedRow: return "RaggedRow";
    case ErrorKind::NonNumericCell: return "NonNumericCell";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::NonBinaryCell: return "NonBinaryCell";
    case ErrorKind::WrongEventColumns: return "WrongEventColumns";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::TooShortForLevels: return "TooShortForLevels";
    case ErrorKind::InconsistentLengths: return "InconsistentLengths";
    case ErrorKind::InvalidCutoff: return "InvalidCutoff";
    case ErrorKind::DegenerateChannel: return "DegenerateChannel";
    case ErrorKind::ChannelMismatch: return "ChannelMismatch";
    case ErrorKind::RecordingTooShort: return "RecordingTooShort";
    case ErrorKind::InsufficientSeries: return "InsufficientSeries";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::BatchTooSmall: return "BatchTooSmall";
    case ErrorKind::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorKind::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorKind::SingleClass: return "SingleClass";
    case ErrorKind::AllSingleClass: return "AllSingleClass";
    case ErrorKind::Config: return "Config";
    case ErrorKind::CheckpointMismatch: return "CheckpointMismatch";
  }
  return "Unknown";
}

// Every library failure is reported through this type; `kind()` lets callers
// (tests, the CLI exit-code mapping) branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        message_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  // Message without the kind prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

// Runs `fn`, re-raising any Error with `context` prepended and its kind kept.
template <typename Fn>
decltype(auto) with_context(std::string_view context, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(context) + ": " + e.message());
  }
}

}  // namespace gal
