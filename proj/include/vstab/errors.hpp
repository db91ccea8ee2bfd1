#pragma once

#include <stdexcept>
#include <string>

namespace vstab {

/// Base for every error raised by the library. Carries the name of the
/// operation that failed so the CLI can report it.
class Error : public std::runtime_error {
public:
    Error(std::string operation, const std::string& message);
    const std::string& operation() const noexcept { return operation_; }

private:
    std::string operation_;
};

/// A precondition on the input was violated (bad parameters, malformed file).
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A mathematical hypothesis of the stability theory does not hold for the
/// input: degenerate critical point, embedded mode on the imaginary axis.
class HypothesisViolation : public Error {
public:
    using Error::Error;
};

/// A numerical procedure failed to reach its accuracy target.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

}  // namespace vstab
