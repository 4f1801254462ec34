#pragma once

#include <stdexcept>
#include <string>

namespace lumamap {

// Each category maps onto one CLI exit code (see tools/lumamap.cpp).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ProcessingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lumamap
