#pragma once

#include <stdexcept>
#include <string>

namespace netopt {

// Rejected input, file, or configuration. Maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// No route exists (or none was found within the trial budget). CLI exit code 2.
class NoPathError : public std::runtime_error {
public:
  explicit NoPathError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace netopt
