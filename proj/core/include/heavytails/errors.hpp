#pragma once

#include <stdexcept>
#include <string>

namespace heavytails {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (tick rows, calendars, configs, timestamps).
class ParseError : public Error {
public:
    using Error::Error;
};

/// A model or generator parameter lies outside its admissible domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Not enough observations for the requested statistic.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// Zero-variance return sample; the normalized series is undefined.
class NormalizationError : public Error {
public:
    using Error::Error;
};

}  // namespace heavytails
