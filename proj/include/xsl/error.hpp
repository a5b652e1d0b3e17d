#pragma once

#include <stdexcept>
#include <string>

namespace xsl {

// Base of every error this library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input file or stream. Carries the 1-based line when known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    explicit ParseError(const std::string& what) : Error(what), line_(0) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Invalid configuration, model parameters, or corpus spec.
class ConfigError : public Error {
public:
    using Error::Error;
};

// A lexicon lookup failed (word without gold entry).
class MissingEntryError : public Error {
public:
    using Error::Error;
};

// Probe trial construction could not find enough context pairs.
class ConstructionError : public Error {
public:
    using Error::Error;
};

// Evaluation asked for on an empty vocabulary, or a batch row with zero mass.
class EvaluationError : public Error {
public:
    using Error::Error;
};

}  // namespace xsl
