#pragma once

#include <stdexcept>
#include <string>

namespace forestfire {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent rule base, scenario, registry or service config.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A sensor sample that cannot be assessed (non-finite value, bad IMEI, ...).
class InvalidMeasurement : public Error {
 public:
  using Error::Error;
};

// Timestamp not strictly after the last accepted sample for the area.
class StaleMeasurement : public InvalidMeasurement {
 public:
  using InvalidMeasurement::InvalidMeasurement;
};

class CryptoError : public Error {
 public:
  using Error::Error;
};

// One-time key pool has no unused leaves left; the device must be re-provisioned.
class KeyPoolExhausted : public CryptoError {
 public:
  using CryptoError::CryptoError;
};

// Lookup of an area, device or alert that does not exist.
class NotFound : public Error {
 public:
  using Error::Error;
};

}  // namespace forestfire
