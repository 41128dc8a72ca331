#pragma once

#include <stdexcept>
#include <string>

namespace hiersum {

// Data-level problems: malformed input files, schema violations. The CLI
// maps these to exit code 2.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : DataError {
  ParseError(const std::string& what, size_t line)
      : DataError(what + " (line " + std::to_string(line) + ")"), line(line) {}
  size_t line;
};

struct ValidationError : DataError {
  using DataError::DataError;
};

struct MissingAbstract : DataError {
  using DataError::DataError;
};

struct MissingEmbedding : DataError {
  MissingEmbedding(const std::string& doc_id, size_t sentence)
      : DataError("no embedding for document '" + doc_id + "' sentence " +
                  std::to_string(sentence)),
        doc_id(doc_id),
        sentence(sentence) {}
  std::string doc_id;
  size_t sentence;
};

struct CheckpointLoadError : DataError {
  using DataError::DataError;
};

struct EmptyCorpus : DataError {
  using DataError::DataError;
};

struct NoLabeledDocuments : DataError {
  using DataError::DataError;
};

// Logic-level problems: misuse of the numeric core. These indicate a bug in
// the caller, not bad data.
struct LogicError : std::logic_error {
  using std::logic_error::logic_error;
};

struct ShapeMismatch : LogicError {
  using LogicError::LogicError;
};

struct DimensionMismatch : LogicError {
  using LogicError::LogicError;
};

struct LengthMismatch : LogicError {
  using LogicError::LogicError;
};

struct NonScalarLoss : LogicError {
  using LogicError::LogicError;
};

struct EmptyMaskRow : LogicError {
  using LogicError::LogicError;
};

struct EmptyNeighborhood : LogicError {
  using LogicError::LogicError;
};

struct NoPositives : LogicError {
  using LogicError::LogicError;
};

struct OddDimension : LogicError {
  using LogicError::LogicError;
};

struct DomainError : LogicError {
  using LogicError::LogicError;
};

}  // namespace hiersum
