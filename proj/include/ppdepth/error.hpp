#pragma once

#include <stdexcept>
#include <string>

namespace ppdepth {

/// Bad input data or parameters. The CLI maps this to exit code 2.
class invalid_input : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical failure (non-finite objective, non-convergence). Exit code 3.
class numerical_failure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw invalid_input(msg);
}

} // namespace ppdepth
