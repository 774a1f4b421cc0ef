#pragma once

#include <stdexcept>
#include <string>

namespace indicatrix {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct EmptySpace : Error {
  using Error::Error;
};
struct MetricViolation : Error {
  using Error::Error;
};
struct NegativeWeight : Error {
  using Error::Error;
};
struct UnknownPoint : Error {
  using Error::Error;
};
struct InvalidParams : Error {
  using Error::Error;
};
struct UnknownCube : Error {
  using Error::Error;
};
struct UnknownGeneration : Error {
  using Error::Error;
};
struct MonotonicityViolation : Error {
  using Error::Error;
};
struct IndexOutOfRange : Error {
  using Error::Error;
};
struct InvalidSchedule : Error {
  using Error::Error;
};
struct DegenerateInterval : Error {
  using Error::Error;
};
struct FileNotFound : Error {
  using Error::Error;
};
struct SchemaError : Error {
  using Error::Error;
};

}  // namespace indicatrix
