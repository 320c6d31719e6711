#pragma once

#include <stdexcept>
#include <string>

namespace slbec {

// A physical or numerical parameter lies outside its admissible domain.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Grid shape or grid mismatch problems.
class GridError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A computation produced non-finite values or failed to converge.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& message)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
          line_(line) {}

    int line() const { return line_; }

private:
    int line_;
};

}  // namespace slbec
