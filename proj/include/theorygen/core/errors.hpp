#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace theorygen {

/// A record failed a type invariant (bad enum value, empty required field, ...).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed serialized input. Carries the byte offset where parsing stopped.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t byte_offset)
        : std::runtime_error(what), offset(byte_offset) {}
    std::size_t offset;
};

/// A pipeline stage could not complete. Aborts the stage, preserving partial outputs.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage_name, const std::string& what)
        : std::runtime_error(stage_name + ": " + what), stage(std::move(stage_name)) {}
    std::string stage;
};

/// Provider failure that survived the retry budget. Keeps the per-attempt history.
class GatewayError : public std::runtime_error {
public:
    GatewayError(const std::string& what, std::vector<std::string> attempt_history = {})
        : std::runtime_error(what), attempts(std::move(attempt_history)) {}
    std::vector<std::string> attempts;
};

/// A structured response stayed invalid after the one allowed reprompt.
class ContractViolation : public std::runtime_error {
public:
    explicit ContractViolation(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace theorygen
