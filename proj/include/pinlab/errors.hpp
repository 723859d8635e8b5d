#pragma once

#include <stdexcept>
#include <string>

namespace pinlab {

// Bad parameters, horizons exceeding tables, malformed specs.  The CLI
// maps these to exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A truncated ladder or non-converged tail where an exact value was
// required.  Also exit code 2.
struct TruncationError : std::runtime_error {
  explicit TruncationError(const std::string& what) : std::runtime_error(what) {}
};

// Corrupt or mismatched on-disk data (checksum, magic, version, size).
struct DataFormatError : std::runtime_error {
  explicit DataFormatError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pinlab
