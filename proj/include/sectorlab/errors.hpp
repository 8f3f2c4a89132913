#pragma once

#include <stdexcept>
#include <string>

namespace sectorlab {

/// Invalid model or run configuration. The message names the offending field.
class ConfigError : public std::invalid_argument {
  public:
    ConfigError(const std::string& field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(field) {}

    const std::string& field() const noexcept { return field_; }

  private:
    std::string field_;
};

/// radius_for_mu produced r >= 0.5.
class RadiusOutOfRange : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// No focusing index exists because n(1-v) <= 1.
class NoFocusingIndex : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// The joint-count summation could not reach its truncation cap within the term limit.
class TruncationBudgetExceeded : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace sectorlab
