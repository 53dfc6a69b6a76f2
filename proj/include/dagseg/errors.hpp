#pragma once

#include <stdexcept>
#include <string>

namespace dagseg {

// Error categories map 1:1 to CLI exit codes: config=2, io=3, data=4, numeric=5.

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Misuse of the computation-graph API (shape mismatch, bad node id).
// A bug in calling code, not a runtime condition.
struct GraphError : std::logic_error {
    using std::logic_error::logic_error;
};

} // namespace dagseg
