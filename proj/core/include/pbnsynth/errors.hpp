#pragma once

#include <stdexcept>
#include <string>

namespace pbnsynth {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed model or query text; positions are 1-based.
struct ParseError : Error {
    ParseError(std::string const& message, int line, int column)
        : Error(message + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
          line(line),
          column(column) {}
    int line;
    int column;
};

/// An instantiation or region left the well-formed set of the model.
struct IllFormedError : Error {
    using Error::Error;
};

/// Evaluation at a pole, or a degenerate elimination step.
struct EvalError : Error {
    using Error::Error;
};

}  // namespace pbnsynth
