#pragma once

#include <stdexcept>
#include <string>

namespace nnsft {

/// Bad user input or a violated precondition the caller can fix
/// (parse errors, out-of-range symbols, windows too small for the request).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An internal invariant failed. Seeing one of these means a bug, not bad input.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace nnsft
