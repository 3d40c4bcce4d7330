#pragma once

#include <stdexcept>
#include <string>

namespace orlicz {

/// Input rejected before any numerics ran (bad spec string, guard exceeded,
/// violated precondition). Maps to CLI exit code 2.
class validation_error : public std::invalid_argument {
public:
  explicit validation_error(const std::string& what) : std::invalid_argument(what) {}
};

/// A numerical procedure failed to bracket, converge or meet its tolerance.
/// Maps to CLI exit code 3.
class numeric_error : public std::runtime_error {
public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace orlicz
