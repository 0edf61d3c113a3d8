#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace numcal {

/// Syntax or lexical error in expression text. `offset` is the byte
/// position in the input where the error was detected.
class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& message, std::size_t offset)
        : std::runtime_error(message + " at offset " + std::to_string(offset)),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Evaluation failure: unbound variable or arity mismatch.
class eval_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A gradient component whose quotient sequence did not converge.
class gradient_error : public std::runtime_error {
public:
    gradient_error(const std::string& message, std::string variable)
        : std::runtime_error(message), variable_(std::move(variable)) {}

    const std::string& variable() const noexcept { return variable_; }

private:
    std::string variable_;
};

/// Gradient failure inside a descent loop; carries the iterate index.
class descent_error : public std::runtime_error {
public:
    descent_error(const std::string& message, int iterate, std::string variable)
        : std::runtime_error(message), iterate_(iterate), variable_(std::move(variable)) {}

    int iterate() const noexcept { return iterate_; }
    const std::string& variable() const noexcept { return variable_; }

private:
    int iterate_;
    std::string variable_;
};

} // namespace numcal
