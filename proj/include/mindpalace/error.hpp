#pragma once

#include <stdexcept>
#include <string>

namespace mindpalace {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed scenario, palace document or configuration. CLI exit code 2.
class ValidationError : public Error {
public:
    using Error::Error;
};

// The remote oracle could not be reached or answered with a non-2xx status.
class OracleTransportError : public Error {
public:
    using Error::Error;
};

// The remote oracle replied, but the reply did not contain the expected fields.
class OracleParseError : public Error {
public:
    OracleParseError(const std::string& what, std::string raw)
        : Error(what), raw_(std::move(raw)) {}

    const std::string& raw() const { return raw_; }

private:
    std::string raw_;
};

class BudgetError : public Error {
public:
    using Error::Error;
};

class NoPathError : public Error {
public:
    using Error::Error;
};

}  // namespace mindpalace
