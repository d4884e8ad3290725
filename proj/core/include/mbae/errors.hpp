#pragma once

#include <stdexcept>
#include <string>

namespace mbae {

// Base for everything thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad shapes, bad layer lists, infeasible environment setups, bad config files.
struct ConfigError : Error {
  using Error::Error;
};

// NaN/Inf surfaced by a forward or backward pass, or a non-finite loss.
struct NumericError : Error {
  using Error::Error;
};

// API misuse: replaying a consumed tape, optimizer state mismatch, and similar.
struct UsageError : Error {
  using Error::Error;
};

// File-level problems: truncated checkpoints, malformed CSV, unwritable paths.
struct IoError : Error {
  using Error::Error;
};

// A numeric error during training, annotated with the episode it happened in.
struct TrainAbortError : Error {
  TrainAbortError(int episode_index, const std::string& what)
      : Error("episode " + std::to_string(episode_index) + ": " + what),
        episode(episode_index) {}
  int episode;
};

}  // namespace mbae
