#pragma once

#include <stdexcept>
#include <string>

namespace arena {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range configuration data (indices, parameters).
class InvalidConfiguration : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class TooManyRegions : public Error {
public:
    using Error::Error;
};

/// Every player of a game failed; no winner can be declared.
class GameFailed : public Error {
public:
    using Error::Error;
};

/// A score was requested for a player with no qualifying games.
class NoHistory : public Error {
public:
    using Error::Error;
};

/// Exhaustive enumeration was requested on a space above the size cap.
class RefusedEnumeration : public Error {
public:
    using Error::Error;
};

/// Experiment configuration file errors; maps to CLI exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Runner/backend failures; maps to CLI exit code 3.
class RunnerError : public Error {
public:
    using Error::Error;
};

} // namespace arena
