#pragma once

#include <stdexcept>
#include <string>

namespace cohrel {

// Every failure raised by the library derives from Error. The four branches
// line up with the CLI exit codes (2, 3, 4, 5).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InputError : public Error {
public:
    using Error::Error;
};

class ParseError : public InputError {
public:
    ParseError(const std::string& what, std::size_t position)
        : InputError(what), position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

class DimensionError : public InputError {
public:
    using InputError::InputError;
};

class TieError : public InputError {
public:
    using InputError::InputError;
};

class UnsupportedSystemError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

class SingularityError : public NumericError {
public:
    SingularityError(const std::string& what, double t) : NumericError(what), t_(t) {}
    double at() const noexcept { return t_; }

private:
    double t_;
};

class DegenerateMaskError : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace cohrel
