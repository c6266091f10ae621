#pragma once

#include <stdexcept>

namespace linsym {

/// Malformed input file (wrong structure or types).
class SchemaError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace linsym
