#pragma once

#include <stdexcept>
#include <string>

namespace iab {

/// Invalid argument to an operation (bad count, unknown node id, negative cost, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input file. The message names the offending field.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent combination of otherwise valid settings.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace iab
