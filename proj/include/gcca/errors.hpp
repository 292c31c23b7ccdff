#pragma once

#include <stdexcept>
#include <string>

namespace gcca {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// --- matrix kernels ---

class NotSymmetricError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

class RankTooLargeError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

// --- graphs ---

class ZeroNormSampleError : public Error {
 public:
  explicit ZeroNormSampleError(long index)
      : Error("sample " + std::to_string(index) + " has zero norm"), index(index) {}
  long index;
};

class ClassTooSmallError : public Error {
 public:
  ClassTooSmallError(int class_id, long size, long required)
      : Error("class " + std::to_string(class_id) + " has " + std::to_string(size) +
              " samples, needs at least " + std::to_string(required)),
        class_id(class_id),
        size(size) {}
  int class_id;
  long size;
};

class InvalidGraphError : public Error {
 public:
  using Error::Error;
};

class GraphSizeMismatchError : public Error {
 public:
  using Error::Error;
};

class UnsupportedFilterError : public Error {
 public:
  using Error::Error;
};

// --- dual / kernel solvers ---

class EpsilonNonPositiveError : public Error {
 public:
  using Error::Error;
};

class SingularKernelError : public Error {
 public:
  using Error::Error;
};

class BandwidthNonPositiveError : public Error {
 public:
  using Error::Error;
};

class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

class EmptyDictionaryError : public Error {
 public:
  using Error::Error;
};

// --- evaluation pipeline ---

class KTooLargeError : public Error {
 public:
  using Error::Error;
};

class BadSplitPointError : public Error {
 public:
  using Error::Error;
};

// --- file I/O ---

class ParseError : public Error {
 public:
  ParseError(const std::string& what, long line, long column)
      : Error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
        line(line),
        column(column) {}
  long line;
  long column;
};

class RaggedRowsError : public Error {
 public:
  using Error::Error;
};

class BadMagicError : public Error {
 public:
  using Error::Error;
};

class TruncatedFileError : public Error {
 public:
  using Error::Error;
};

class CountMismatchError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Model is missing the state an operation needs (e.g. projecting with a
// kernel model that carries no training data).
class ModelStateError : public Error {
 public:
  using Error::Error;
};

}  // namespace gcca
