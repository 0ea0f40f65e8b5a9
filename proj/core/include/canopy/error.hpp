#pragma once

#include <stdexcept>
#include <string>

namespace canopy {

// Error taxonomy mirrored by the CLI exit codes: ingestion problems (bad or
// missing input files) exit 2, invariant/parameter violations exit 3, and
// operations that need ground-truth genus labels exit 4.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IngestError : public Error {
public:
  using Error::Error;
};

class InvariantError : public Error {
public:
  using Error::Error;
};

class MissingGenusError : public Error {
public:
  using Error::Error;
};

}  // namespace canopy
