#pragma once

#include <stdexcept>
#include <string>

namespace retrend {

/// Base class for every error the library raises on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptySeries : Error {
    using Error::Error;
};

struct WindowOutOfRange : Error {
    using Error::Error;
};

struct DomainError : Error {
    using Error::Error;
};

struct RankDeficient : Error {
    using Error::Error;
};

struct Underdetermined : Error {
    using Error::Error;
};

struct DegenerateWindow : Error {
    using Error::Error;
};

struct SeriesTooShort : Error {
    using Error::Error;
};

struct DegenerateTarget : Error {
    using Error::Error;
};

struct SelfLoopEdge : Error {
    using Error::Error;
};

/// Malformed input record; the message carries the offending line number.
struct ParseError : Error {
    using Error::Error;
};

struct SourceUnavailable : Error {
    using Error::Error;
};

struct GapError : Error {
    using Error::Error;
};

struct OrderError : Error {
    using Error::Error;
};

struct RangeError : Error {
    using Error::Error;
};

struct CacheCorrupt : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace retrend
