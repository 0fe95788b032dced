#pragma once

#include <stdexcept>

namespace fapareto {

/// Invalid run or model configuration. CLI maps this to exit code 1.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dataset failed validation (parse failure, empty (group,label) cell, ...).
/// CLI maps this to exit code 2.
struct data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Run artifacts missing or corrupt during report generation. CLI exit code 3.
struct artifact_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace fapareto
