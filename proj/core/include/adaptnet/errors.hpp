#pragma once

#include <stdexcept>
#include <string>

namespace adaptnet {

// Error taxonomy mirrors the CLI exit codes: config -> 1, identity/acceptance
// failures -> 2, topology/placement -> 3.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TopologyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A combiner produced an invalid weight row (negative weight, bad support,
// row sum off by more than 1e-12). Always a bug or model misuse, never clamped.
struct CombinerError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PlacementError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace adaptnet
