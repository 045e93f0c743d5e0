#pragma once

#include <stdexcept>
#include <string>

namespace skyroute {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed document: missing field, wrong type, unknown schema tag.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Well-formed document that violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class OverPayload : public Error {
 public:
  using Error::Error;
};

class NoCapableDrone : public Error {
 public:
  using Error::Error;
};

class NoComposition : public Error {
 public:
  using Error::Error;
};

class CapExceeded : public Error {
 public:
  using Error::Error;
};

class NoFreePad : public Error {
 public:
  using Error::Error;
};

class AllInfeasible : public Error {
 public:
  using Error::Error;
};

}  // namespace skyroute
