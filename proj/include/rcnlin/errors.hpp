#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace rcnlin {

/// Raised when caller-supplied data violates an operation's preconditions.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A loss (or its derivative) left the range representable in double
/// precision. Carries the margin and, when known, the atom that produced it.
class LossDomainError : public std::runtime_error {
public:
    LossDomainError(const std::string& what, double margin,
                    std::optional<std::size_t> atom = std::nullopt)
        : std::runtime_error(what), margin_(margin), atom_(atom) {}

    double margin() const { return margin_; }
    std::optional<std::size_t> atom() const { return atom_; }

private:
    double margin_;
    std::optional<std::size_t> atom_;
};

} // namespace rcnlin
