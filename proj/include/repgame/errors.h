// Copyright 2026 The Repgame Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef REPGAME_ERRORS_H_
#define REPGAME_ERRORS_H_

#include <stdexcept>
#include <string>

namespace repgame {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// An operation was attempted on an EpisodeState that does not admit it
// (terminal state, wrong turn, illegal action).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Exact enumeration would exceed the configured node cap.
class AbstractionTooLarge : public Error {
 public:
  using Error::Error;
};

// Simulation budget (sharpening, rollouts) exhausted.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

// A statistic is not defined on the given data (too few points, zero
// variance).
class UndefinedStatistic : public Error {
 public:
  using Error::Error;
};

class BridgeError : public Error {
 public:
  using Error::Error;
};

}  // namespace repgame

#endif  // REPGAME_ERRORS_H_
