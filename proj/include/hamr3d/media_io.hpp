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


// Plain-text medium serialization. Doubles are written in shortest
// round-trip form, so save -> load reproduces the stack exactly.

#ifndef HAMR3D_MEDIA_IO_HPP
#define HAMR3D_MEDIA_IO_HPP

#include <string>

#include "hamr3d/media.hpp"

namespace hamr {

inline constexpr const char* kMediaMagic = "# hamr3d-media v1";

std::string serialize_media(const MediaStack& stack);
MediaStack parse_media(const std::string& text);

void save_media(const std::string& path, const MediaStack& stack);
MediaStack load_media(const std::string& path);

/// Human-readable per-layer distribution summary, one line per layer.
std::string media_summary(const MediaStack& stack);

}  // namespace hamr

#endif  // HAMR3D_MEDIA_IO_HPP
