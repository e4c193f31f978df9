#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bhl {

/// Malformed polynomial or operator file. `where` is a JSON path such as
/// "coefficients[3].alpha" or, for syntax errors, "byte 120".
class ParseError : public std::runtime_error {
public:
    ParseError(std::string where, const std::string& what)
        : std::runtime_error(where + ": " + what), where_(std::move(where)) {}

    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

/// A requested computation exceeds the documented work limit.
class ComplexityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace bhl
