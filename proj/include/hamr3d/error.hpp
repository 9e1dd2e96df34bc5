// Copyright 2026 The hamr3d Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HAMR3D_ERROR_HPP
#define HAMR3D_ERROR_HPP

#include <stdexcept>
#include <string>

namespace hamr {

enum class ErrorKind {
  kConfig,
  kGeometry,
  kSimulation,
  kIo,
};

/// Single exception type of the library. The kind maps 1:1 onto the C API
/// status codes and the CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void config_error(const std::string& what) {
  throw Error(ErrorKind::kConfig, what);
}

[[noreturn]] inline void geometry_error(const std::string& what) {
  throw Error(ErrorKind::kGeometry, what);
}

[[noreturn]] inline void simulation_error(const std::string& what) {
  throw Error(ErrorKind::kSimulation, what);
}

[[noreturn]] inline void io_error(const std::string& what) {
  throw Error(ErrorKind::kIo, what);
}

}  // namespace hamr

#endif  // HAMR3D_ERROR_HPP
