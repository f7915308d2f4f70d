// include/irl/errors.hpp

// Copyright 2026  irlkit authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef IRL_ERRORS_HPP
#define IRL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace irl {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A signal with no usable content (zero power, empty buffer).
struct DegenerateSignal : Error { using Error::Error; };
// Input too short for the requested analysis window.
struct TooShort : Error { using Error::Error; };
// Character or token outside the vocabulary.
struct VocabError : Error { using Error::Error; };
// Incompatible tensor/waveform shapes or rates.
struct ShapeError : Error { using Error::Error; };
// Operation applied to a tensor of the wrong rank.
struct RankError : Error { using Error::Error; };
// A required representation tap is missing.
struct TapError : Error { using Error::Error; };
// NaN/Inf where a finite value is required.
struct NumericError : Error { using Error::Error; };
// Reference string empty where an error rate is undefined.
struct DegenerateReference : Error { using Error::Error; };
// Output location already populated and --force not given.
struct RefusedOverwrite : Error { using Error::Error; };
// Missing or unusable filesystem path.
struct PathError : Error { using Error::Error; };
// Checkpoint does not match the active configuration.
struct IncompatibleCheckpoint : Error { using Error::Error; };
// Malformed or inconsistent configuration value.
struct ConfigError : Error { using Error::Error; };
// Failed read/write or malformed file contents.
struct IoError : Error { using Error::Error; };

}  // namespace irl

#endif  // IRL_ERRORS_HPP
