#ifndef UNINET_ERRORS_HPP_
#define UNINET_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace uninet {

/// Argument outside the mathematical domain of an operator (NaN, inf,
/// invalid squashing parameters).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Caller broke a documented precondition (length mismatch, stale cache).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Invalid network, training or extraction configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input files or schemas.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Training diverged (NaN or infinite loss).
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, std::size_t epoch, std::size_t batch)
      : std::runtime_error(what), epoch_(epoch), batch_(batch) {}

  std::size_t epoch() const { return epoch_; }
  std::size_t batch() const { return batch_; }

 private:
  std::size_t epoch_;
  std::size_t batch_;
};

}  // namespace uninet

#endif  // UNINET_ERRORS_HPP_
