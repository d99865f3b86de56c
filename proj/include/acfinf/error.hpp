#pragma once

#include <stdexcept>
#include <string>

namespace acfinf {

// Precondition violations derive from std::invalid_argument; failures that
// depend on the data (degenerate samples, overflow) derive from
// std::runtime_error. The CLI maps the first family to exit code 2 and the
// second to exit code 3.

class InvalidSeries : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class LagOutOfRange : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class InvalidIndex : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class InvalidLagCount : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class InvalidNullSpec : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class InvalidAlpha : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class NonpositiveTau : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class InvalidParams : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class BadShape : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class InsufficientData : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class DegenerateSeries : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InsufficientTail : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class UnknownTheoreticalAcf : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class Overflow : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace acfinf
