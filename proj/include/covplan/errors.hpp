#pragma once

#include <stdexcept>
#include <string>

namespace covplan {

// Base class for all planner errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Geometry
class InvalidRing : public Error {
 public:
  using Error::Error;
};
class GeometryError : public Error {
 public:
  using Error::Error;
};
class IndexError : public Error {
 public:
  using Error::Error;
};
class NotAdjacent : public Error {
 public:
  using Error::Error;
};

// Parameters / configuration
class InvalidParameter : public Error {
 public:
  using Error::Error;
};
class WindTooStrong : public Error {
 public:
  using Error::Error;
};
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Graph / routing
class InvalidDepot : public Error {
 public:
  using Error::Error;
};
class DisconnectedInstance : public Error {
 public:
  using Error::Error;
};
class InfeasibleEdge : public Error {
 public:
  using Error::Error;
};
class Infeasible : public Error {
 public:
  using Error::Error;
};
class TooLarge : public Error {
 public:
  using Error::Error;
};

// I/O
class FormatError : public Error {
 public:
  using Error::Error;
};
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace covplan
