#pragma once

#include <stdexcept>
#include <string>

namespace smm {

/// Raised when a caller violates a documented precondition.
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a computation produces a non-finite value. `block()` names the
/// parameter block (or stage) where it was first observed.
class NumericError : public std::runtime_error {
public:
    NumericError(std::string block, const std::string& what)
        : std::runtime_error(what), block_(std::move(block)) {}

    const std::string& block() const noexcept { return block_; }

private:
    std::string block_;
};

/// Raised when a persisted artifact has an unknown format or version.
class ArtifactVersionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {
inline void require(bool cond, const char* msg) {
    if (!cond) throw ContractViolation(msg);
}
}  // namespace detail

}  // namespace smm
