#pragma once

#include <stdexcept>
#include <string>

namespace rwre {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An observed value is missing from the declared atomic support.
class SupportDriftError : public Error {
public:
    explicit SupportDriftError(double value)
        : Error("support drift: observed value outside the declared support"), value_(value) {}
    double value() const { return value_; }

private:
    double value_;
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

class InconsistentBlocksError : public Error {
public:
    InconsistentBlocksError() : Error("inconsistent blocks") {}
};

class FormatError : public Error {
public:
    using Error::Error;
};

} // namespace rwre
