#pragma once

#include <stdexcept>
#include <string>

namespace tailproc {

// Model parameters violate a stationarity/drift/positivity condition.
struct invalid_spec_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// An estimator is not defined for the given sample (e.g. nonpositive
// threshold order statistic, k out of range).
struct estimator_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct root_not_bracketed_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct insufficient_exceedances_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace tailproc
