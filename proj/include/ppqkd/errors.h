#ifndef PPQKD_ERRORS_H
#define PPQKD_ERRORS_H

#include <stdexcept>
#include <string>

namespace ppqkd {

/// Invalid configuration. `field()` names the offending entry.
class ConfigError : public std::invalid_argument {
  public:
    ConfigError(std::string field, const std::string &what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

    const std::string &field() const { return field_; }

  private:
    std::string field_;
};

/// Every parity bit was set, so no pivot exists for erasure resolution.
class NoPivotError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace ppqkd

#endif
