#pragma once

#include <stdexcept>
#include <string>

namespace ncrc {

// Malformed data handed to an operation (empty matrix, loss out of range, ...).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A method, generator or plan was configured inconsistently.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace ncrc
