#pragma once

#include <stdexcept>
#include <string>

namespace ivd {

// Parse failure; `offset` is the byte position in the source text.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t offset, const std::string& what)
        : std::runtime_error(what + " (at offset " + std::to_string(offset) + ")"),
          offset(offset) {}
    std::size_t offset;
};

// Evaluation outside the domain of an elementary operation.  `where` prints
// the offending subexpression.
class DomainError : public std::runtime_error {
public:
    DomainError(const std::string& what, const std::string& where)
        : std::runtime_error(what + " in subexpression '" + where + "'"),
          subexpr(where) {}
    std::string subexpr;
};

class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ivd
