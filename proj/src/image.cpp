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

#include "vigil/image.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace vigil {
namespace {

// Next whitespace-separated header token, skipping '#' comments.
std::string header_token(std::istream& in) {
  std::string token;
  char ch;
  while (in.get(ch)) {
    if (ch == '#') {
      std::string ignored;
      std::getline(in, ignored);
      if (!token.empty()) break;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(ch);
  }
  return token;
}

int header_int(std::istream& in) {
  const std::string token = header_token(in);
  try {
    std::size_t used = 0;
    int value = std::stoi(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return value;
  } catch (const std::exception&) {
    throw Error(ErrorKind::IoError, "malformed PNM header token '" + token + "'");
  }
}

}  // namespace

Frame read_pnm(std::istream& in, std::size_t index) {
  const std::string magic = header_token(in);
  int channels = 0;
  if (magic == "P5") channels = 1;
  else if (magic == "P6") channels = 3;
  else throw Error(ErrorKind::IoError, "unsupported PNM magic '" + magic + "'");

  const int width = header_int(in);
  const int height = header_int(in);
  const int maxval = header_int(in);
  if (width <= 0 || height <= 0) throw Error(ErrorKind::IoError, "invalid PNM dimensions");
  if (maxval != 255) throw Error(ErrorKind::IoError, "only maxval 255 is supported");

  Frame frame(index, width, height, channels);
  in.read(reinterpret_cast<char*>(frame.pixels.data()), frame.pixels.size());
  if (in.gcount() != frame.pixels.size()) throw Error(ErrorKind::IoError, "truncated PNM data");
  return frame;
}

Frame read_pnm(const std::filesystem::path& path, std::size_t index) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  return read_pnm(in, index);
}

void write_pnm(std::ostream& out, const Frame& frame) {
  frame.validate();
  out << (frame.channels == 1 ? "P5" : "P6") << '\n'
      << frame.width << ' ' << frame.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(frame.pixels.data()), frame.pixels.size());
}

void write_pnm(const std::filesystem::path& path, const Frame& frame) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  write_pnm(out, frame);
}

}  // namespace vigil
