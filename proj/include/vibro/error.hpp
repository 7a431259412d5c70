#pragma once

#include <stdexcept>
#include <string>

namespace vibro {

// Status values shared by the C API and the CLI exit-code contract:
// 0 success, 1 input/parse error, 2 config error, 3 analysis failure.
enum class Status : int {
    ok = 0,
    input_error = 1,
    config_error = 2,
    analysis_error = 3,
};

class Error : public std::runtime_error {
public:
    Error(Status status, const std::string& message)
        : std::runtime_error(message), status_(status) {}

    Status status() const noexcept { return status_; }

private:
    Status status_;
};

class InputError : public Error {
public:
    explicit InputError(const std::string& message) : Error(Status::input_error, message) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message) : Error(Status::config_error, message) {}
};

class AnalysisError : public Error {
public:
    explicit AnalysisError(const std::string& message) : Error(Status::analysis_error, message) {}
};

} // namespace vibro
