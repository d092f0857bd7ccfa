#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace recobert {

enum class ErrorKind {
  // catalog
  MissingField,
  DuplicateId,
  EmptyText,
  MissingColumn,
  UnknownId,
  DegenerateSplit,
  // tokenizer
  EmptyVocabulary,
  EmptySide,
  // encoder
  InvalidConfig,
  ShapeMismatch,
  EmptySpan,
  BadMagic,
  VersionUnsupported,
  VocabMismatch,
  CorruptTensor,
  // objectives
  ZeroVector,
  LengthMismatch,
  PositionOutOfRange,
  // trainer
  CatalogTooSmall,
  NonFiniteLoss,
  // ranker / metrics
  UnknownSeed,
  EmptyCandidates,
  MissingRanking,
  // generic
  InvalidArgument,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Error raised by every recobert operation. `kind()` identifies the failure,
/// `what()` carries the offending location (record number, id, tensor name).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  bool is_io() const noexcept { return kind_ == ErrorKind::Io; }

 private:
  ErrorKind kind_;
};

}  // namespace recobert
