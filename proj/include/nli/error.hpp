#ifndef NLI_ERROR_HPP
#define NLI_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nli {

// Base for every error raised by the toolkit. The CLI maps the concrete
// subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text (CoNLL-U, TSV, JSON).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  explicit ParseError(const std::string& what) : Error(what) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_ = 0;
};

// Well-formed input that violates a data invariant (bad tree, unknown
// label, missing annotation layer, too few documents...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Misuse of an operation: bad argument values, dimension mismatch.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace nli

#endif  // NLI_ERROR_HPP
