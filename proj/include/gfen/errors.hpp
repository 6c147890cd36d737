#pragma once

#include <stdexcept>

namespace gfen {

// CLI exit-code contract: ConfigError -> 2, NumericError -> 3.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace gfen
