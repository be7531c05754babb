#pragma once

#include <stdexcept>
#include <string>

namespace genplan {

// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Two triggered effects assign opposite polarities to one fluent.
// Always indicates a modeling bug upstream, never a recoverable condition.
class ConflictingEffectsError : public Error {
public:
    explicit ConflictingEffectsError(const std::string& msg) : Error(msg) {}
};

class NotApplicableError : public Error {
public:
    explicit NotApplicableError(const std::string& msg) : Error(msg) {}
};

class UnknownActionError : public Error {
public:
    explicit UnknownActionError(const std::string& name)
        : Error("unknown action: " + name) {}
};

class BadConfigError : public Error {
public:
    explicit BadConfigError(const std::string& msg) : Error(msg) {}
};

// Program or manifest text that does not parse; carries a 1-based line.
class ParseError : public Error {
public:
    ParseError(int line, const std::string& msg)
        : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

class NameCollisionError : public Error {
public:
    explicit NameCollisionError(const std::string& msg) : Error(msg) {}
};

} // namespace genplan
