#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rbp {

// Momentum-form update cannot divide by the previous learning rate; the
// caller is expected to fall back to the direct gradient path.
struct DegenerateMomentumError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A state machine was driven into a state its contract excludes.
struct InvalidStateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Simulation or training produced non-finite values. Carries the step at
// which the divergence was detected.
struct DivergenceError : std::runtime_error {
  DivergenceError(const std::string& what, std::size_t at_step)
      : std::runtime_error(what + " (step " + std::to_string(at_step) + ")"), step(at_step) {}
  std::size_t step;
};

// Experiment configuration or CSV input could not be parsed. The message
// carries file and line.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rbp
