#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mobai {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Two arms share the maximum mean of an objective in strict mode.
class DuplicateMaximum : public Error {
public:
    explicit DuplicateMaximum(std::size_t objective)
        : Error("duplicate maximum on objective " + std::to_string(objective + 1)),
          objective_(objective) {}
    std::size_t objective() const noexcept { return objective_; }

private:
    std::size_t objective_;
};

class InvalidShape : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ShapeMismatch : public Error {
public:
    using Error::Error;
};

class BestArmArgument : public Error {
public:
    using Error::Error;
};

class DegenerateDenominator : public Error {
public:
    using Error::Error;
};

class TooManyArms : public Error {
public:
    using Error::Error;
};

class LpInfeasible : public Error {
public:
    using Error::Error;
};

class NotInitialized : public Error {
public:
    using Error::Error;
};

class ArmMismatch : public Error {
public:
    using Error::Error;
};

class CapExceeded : public Error {
public:
    using Error::Error;
};

class UnvisitedArm : public Error {
public:
    using Error::Error;
};

}  // namespace mobai
