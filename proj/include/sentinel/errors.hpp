#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sentinel {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// -- numeric layer --------------------------------------------------------

class NonFiniteError : public Error {
public:
    using Error::Error;
};

class ZeroMassError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

// -- monitoring -----------------------------------------------------------

class OutOfOrderError : public Error {
public:
    using Error::Error;
};

class StateFrozenError : public Error {
public:
    using Error::Error;
};

class WindowNotFilledError : public Error {
public:
    using Error::Error;
};

// -- prompts and verification ---------------------------------------------

class EmptyPromptError : public Error {
public:
    using Error::Error;
};

// -- backends ---------------------------------------------------------------

class ConnectError : public Error {
public:
    using Error::Error;
};

class ProtocolError : public Error {
public:
    using Error::Error;
};

class TopKUnavailableError : public Error {
public:
    using Error::Error;
};

/// Trace file could not be parsed; carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class NoTraceForPromptError : public Error {
public:
    using Error::Error;
};

/// Backend failure surfaced through a detection session; the message is
/// prefixed with the pass ("pass 1"/"pass 2") in which it occurred.
class BackendError : public Error {
public:
    using Error::Error;
};

// -- synthesis --------------------------------------------------------------

class InfeasibleEntropyError : public Error {
public:
    using Error::Error;
};

// -- evaluation --------------------------------------------------------------

class MissingFlippedTraceError : public Error {
public:
    using Error::Error;
};

class EmptyCorpusError : public Error {
public:
    using Error::Error;
};

class EmptyClassError : public Error {
public:
    using Error::Error;
};

}  // namespace sentinel
