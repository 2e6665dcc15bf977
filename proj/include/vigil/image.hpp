// Copyright 2026 The Vigil Authors
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

#pragma once

#include <filesystem>
#include <iosfwd>

#include "vigil/core.hpp"

namespace vigil {

/// Binary PGM (P5, one channel) or PPM (P6, three channels), maxval 255.
Frame read_pnm(std::istream& in, std::size_t index = 0);
Frame read_pnm(const std::filesystem::path& path, std::size_t index = 0);

/// Writes P5 for single-channel frames and P6 for three-channel frames.
void write_pnm(std::ostream& out, const Frame& frame);
void write_pnm(const std::filesystem::path& path, const Frame& frame);

}  // namespace vigil
