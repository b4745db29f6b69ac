#pragma once

#include <stdexcept>
#include <string>

namespace swapsim {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Series failed to converge (ratio >= 1 or term limit reached).
class NonConvergence : public Error {
public:
    using Error::Error;
};

// eta = 1 with a nonzero dark-count probability has no finite thermal model.
class SingularModel : public Error {
public:
    using Error::Error;
};

class MeaninglessConditional : public Error {
public:
    using Error::Error;
};

class EmptyPostselection : public Error {
public:
    using Error::Error;
};

class BudgetExceeded : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Floating evaluation produced a probability outside [0,1] by more than the
// clamping tolerance.
class NumericalError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    ConfigError(const std::string& msg, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

class CutoffTooSmall : public Error {
public:
    using Error::Error;
};

} // namespace swapsim
