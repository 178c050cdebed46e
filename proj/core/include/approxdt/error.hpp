#pragma once

#include <stdexcept>
#include <string>

namespace approxdt {

/// Bad user input: malformed files, out-of-range parameters, missing paths.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A broken internal invariant. Seeing one of these is a bug.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace approxdt
