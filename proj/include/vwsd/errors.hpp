#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vwsd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed dataset, gold or fixture file. Carries the 1-based line number when known.
class DatasetError : public Error {
 public:
  DatasetError(const std::string& message, std::size_t line = 0)
      : Error(line > 0 ? message + " (line " + std::to_string(line) + ")" : message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Invalid argument or violated precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A weighted combination of embeddings collapsed to the zero vector.
class DegenerateEmbedding : public Error {
 public:
  using Error::Error;
};

/// The backend does not implement an optional capability (e.g. token hidden states).
class Unsupported : public Error {
 public:
  using Error::Error;
};

/// Image could not be read or decoded. Carries the image reference.
class ImageError : public Error {
 public:
  ImageError(const std::string& image_ref, const std::string& reason)
      : Error(image_ref + ": " + reason), image_ref_(image_ref) {}

  const std::string& image_ref() const noexcept { return image_ref_; }

 private:
  std::string image_ref_;
};

/// Element failure inside a batch call; `index()` is the position in the input list.
class BatchError : public Error {
 public:
  BatchError(std::size_t index, const std::string& reason)
      : Error("batch element " + std::to_string(index) + ": " + reason), index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Configuration key or value rejected during validation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Evaluation aborted, e.g. too many samples failed.
class EvaluationAborted : public Error {
 public:
  using Error::Error;
};

}  // namespace vwsd
