#pragma once

#include <stdexcept>
#include <string>

namespace sshq {

/// Requested size exceeds what the dense representation supports.
class CapacityError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A mathematical invariant (unitarity, normalization, range) does not hold.
class InvariantError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

/// Malformed caller input (empty tables, bad bitstrings, odd chain lengths, ...).
class InputError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

} // namespace sshq
