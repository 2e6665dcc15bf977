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

#include "vigil/windowing.hpp"

#include <string>

namespace vigil {

void WindowSpec::validate() const {
  if (window_len < 2) throw Error(ErrorKind::InvalidParam, "window_len must be >= 2");
  if (overlap >= window_len) throw Error(ErrorKind::InvalidParam, "overlap must be < window_len");
  if (stride && *stride < 1) throw Error(ErrorKind::InvalidParam, "stride must be >= 1");
  if (target_count < 2) throw Error(ErrorKind::InvalidParam, "target_count must be >= 2");
  if (dynamic_factor < 1) throw Error(ErrorKind::InvalidParam, "dynamic_factor must be >= 1");
}

std::size_t dynamic_step(std::size_t n_frames, std::size_t target_count) {
  if (target_count < 2) throw Error(ErrorKind::InvalidParam, "target_count must be >= 2");
  if (n_frames < target_count)
    throw Error(ErrorKind::VideoTooShort, "video has " + std::to_string(n_frames) +
                                              " frames, need at least " +
                                              std::to_string(target_count));
  return n_frames / target_count;
}

namespace {

std::vector<SequenceWindow> strided(std::size_t n_frames, std::size_t len, std::size_t step,
                                    std::size_t spacing, WindowGenerator gen) {
  std::vector<SequenceWindow> windows;
  const std::size_t span = (len - 1) * spacing + 1;
  if (n_frames < span)
    throw Error(ErrorKind::VideoTooShort, "video has " + std::to_string(n_frames) +
                                              " frames, a window spans " + std::to_string(span));
  for (std::size_t start = 0; start + span <= n_frames; start += step) {
    SequenceWindow w;
    w.generator = gen;
    w.window_id = windows.size();
    w.frame_indices.reserve(len);
    for (std::size_t i = 0; i < len; ++i) w.frame_indices.push_back(start + i * spacing);
    windows.push_back(std::move(w));
  }
  return windows;
}

}  // namespace

std::vector<SequenceWindow> generate_windows(const WindowSpec& spec, std::size_t n_frames) {
  spec.validate();
  switch (spec.mode) {
    case WindowGenerator::Sliding:
      return strided(n_frames, spec.window_len, spec.stride.value_or(spec.window_len), 1,
                     WindowGenerator::Sliding);
    case WindowGenerator::SlidingOverlap:
      return strided(n_frames, spec.window_len, spec.window_len - spec.overlap, 1,
                     WindowGenerator::SlidingOverlap);
    case WindowGenerator::DynamicStep: {
      const std::size_t step = dynamic_step(n_frames, spec.target_count);
      SequenceWindow w;
      w.generator = WindowGenerator::DynamicStep;
      for (std::size_t i = 0; i < spec.target_count; ++i) w.frame_indices.push_back(i * step);
      return {std::move(w)};
    }
    case WindowGenerator::SlidingDynamic:
      return strided(n_frames, spec.window_len, spec.window_len * spec.dynamic_factor,
                     spec.dynamic_factor, WindowGenerator::SlidingDynamic);
  }
  return {};
}

}  // namespace vigil
