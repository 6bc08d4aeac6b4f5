#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nonstat {

/// Base of every error raised by the library. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t row, std::size_t column, const std::string& what)
        : Error("parse error at row " + std::to_string(row) +
                (column ? ", column " + std::to_string(column) : std::string{}) + ": " + what),
          row_(row), column_(column) {}

    /// 1-based line number in the source; column is 1-based, 0 when the whole row is at fault.
    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

class EmptyInput : public Error { public: using Error::Error; };
class DegenerateComponent : public Error { public: using Error::Error; };
class ConfigError : public Error { public: using Error::Error; };
class WindowError : public Error { public: using Error::Error; };
class RankDeficient : public Error { public: using Error::Error; };
class InsufficientData : public Error { public: using Error::Error; };
class UnstableModel : public Error { public: using Error::Error; };
class DomainError : public Error { public: using Error::Error; };
class CaseError : public Error { public: using Error::Error; };
class StateError : public Error { public: using Error::Error; };

}  // namespace nonstat
