// errors.hpp
// Exception hierarchy for the entangle library. Three families:
// StateError (invalid or ill-sized states), NumericsError (eigensolver
// trouble or tolerance-sensitive decisions), ParseError (input text).

#pragma once

#include <stdexcept>
#include <string>

namespace entangle {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --- invalid state / size family ---

class StateError : public Error {
public:
    using Error::Error;
};

class ZeroStateError : public StateError {
public:
    using StateError::StateError;
};

class SizeLimitError : public StateError {
public:
    using StateError::StateError;
};

class DimensionMismatchError : public StateError {
public:
    using StateError::StateError;
};

class EmptySubsetError : public StateError {
public:
    using StateError::StateError;
};

class TrivialSubsetError : public StateError {
public:
    using StateError::StateError;
};

class NotSeparableError : public StateError {
public:
    using StateError::StateError;
};

// --- numerical family ---

class NumericsError : public Error {
public:
    using Error::Error;
};

class EigenFailureError : public NumericsError {
public:
    using NumericsError::NumericsError;
};

// A density matrix failed its Hermitian/trace/positivity invariants by more
// than the declared tolerances.
class InvariantError : public NumericsError {
public:
    using NumericsError::NumericsError;
};

// A separability decision depends on an eigenvalue too close to the rank
// threshold to call either way.
class NumericalAmbiguityError : public NumericsError {
public:
    using NumericsError::NumericsError;
};

// --- parse family ---

class ParseError : public Error {
public:
    ParseError(const std::string& what, int line, int column)
        : Error(what), line_(line), column_(column) {}
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

class SyntaxError : public ParseError {
public:
    using ParseError::ParseError;
};

class ArityMismatchError : public ParseError {
public:
    using ParseError::ParseError;
};

class BadHeaderError : public ParseError {
public:
    using ParseError::ParseError;
};

class IndexOutOfRangeError : public ParseError {
public:
    using ParseError::ParseError;
};

class DuplicateEntryError : public ParseError {
public:
    using ParseError::ParseError;
};

}  // namespace entangle
