#ifndef ADMIPC_ERRORS_HPP
#define ADMIPC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace admipc {

/// Malformed text input; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input that violates a model contract (sizes, ranges, binary data).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace admipc

#endif  // ADMIPC_ERRORS_HPP
