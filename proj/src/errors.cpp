#include "vstab/errors.hpp"

namespace vstab {

Error::Error(std::string operation, const std::string& message)
    : std::runtime_error(operation + ": " + message), operation_(std::move(operation)) {}

}  // namespace vstab
