#pragma once

#include <stdexcept>
#include <string>

namespace crest {

/// Base class for all crest errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

/// Bad configuration: unknown key, unparsable value, invalid combination.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Bad input data: missing file, malformed CSV row, invalid label.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Incompatible matrix/vector dimensions between operands.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// The Gram matrix could not be factorized even after the ridge fallback.
/// Carries the trace of the offending matrix for diagnostics.
class SingularGramError : public Error {
 public:
  SingularGramError(const std::string &msg, double trace_gram)
      : Error(msg + " (trace = " + std::to_string(trace_gram) + ")"),
        trace_gram_(trace_gram) {}
  double trace_gram() const { return trace_gram_; }

 private:
  double trace_gram_;
};

/// The constrained-maximization objective is identically zero (all class
/// sums vanish), so the weight normalization is undefined.
class DegenerateObjectiveError : public Error {
 public:
  using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace crest
