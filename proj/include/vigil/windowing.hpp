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

#include <cstddef>
#include <optional>
#include <vector>

#include "vigil/core.hpp"

namespace vigil {

struct WindowSpec {
  WindowGenerator mode = WindowGenerator::DynamicStep;
  std::size_t window_len = 20;
  /// Sliding only; unset means window_len (back-to-back windows).
  std::optional<std::size_t> stride;
  /// SlidingOverlap only: frames shared by consecutive windows.
  std::size_t overlap = 0;
  /// DynamicStep only: number of frames summarizing the whole video.
  std::size_t target_count = 20;
  /// SlidingDynamic only: spacing between frames inside a window.
  std::size_t dynamic_factor = 2;
  double fps = 30.0;

  void validate() const;
  /// Number of frames in each emitted window.
  std::size_t frames_per_window() const {
    return mode == WindowGenerator::DynamicStep ? target_count : window_len;
  }
};

/// floor(n_frames / target_count). Throws VideoTooShort when n_frames < target_count.
std::size_t dynamic_step(std::size_t n_frames, std::size_t target_count);

/// Materializes every window of `spec` over a video of `n_frames` frames.
///
///   Sliding         consecutive frames, windows start every `stride` frames
///   SlidingOverlap  consecutive frames, stride = window_len - overlap
///   DynamicStep     one window, frames i * dynamic_step(n, target_count)
///   SlidingDynamic  back-to-back spans of window_len * k frames, each
///                   subsampled every k frames (k = dynamic_factor)
///
/// Windows that would run past the last frame are dropped. Window ids count
/// from 0 in emission order.
std::vector<SequenceWindow> generate_windows(const WindowSpec& spec, std::size_t n_frames);

}  // namespace vigil
