#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ergomax {

// Exit-code taxonomy shared by the library and the CLI:
//   2 = parameter / parse error, 3 = numeric-tolerance failure,
//   4 = cap or iteration-budget overrun.
class Error : public std::runtime_error {
public:
    Error(const std::string& what, int exit_code)
        : std::runtime_error(what), exit_code_(exit_code) {}
    int exit_code() const noexcept { return exit_code_; }

private:
    int exit_code_;
};

class ParameterError : public Error {
public:
    explicit ParameterError(const std::string& what) : Error(what, 2) {}
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("parse error at line " + std::to_string(line) + ": " + what, 2),
          line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(what, 3) {}
};

// Inversion / scan grid too coarse for the symbol it has to resolve.
class AliasingRisk : public Error {
public:
    explicit AliasingRisk(const std::string& what) : Error(what, 2) {}
};

class CapExceeded : public Error {
public:
    CapExceeded(const std::string& what, int level)
        : Error(what, 4), level_(level) {}
    int level() const noexcept { return level_; }

private:
    int level_;
};

class BudgetExceeded : public Error {
public:
    explicit BudgetExceeded(const std::string& what) : Error(what, 4) {}
};

}  // namespace ergomax
