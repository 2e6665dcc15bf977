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

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstring>

#include "vigil/backends.hpp"
#include "vigil/jsonl.hpp"

namespace vigil {

using nlohmann::json;

namespace {

constexpr std::string_view kAlphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

void write_all(int fd, std::string_view data) {
  while (!data.empty()) {
    ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorKind::BackendError, std::string("write to backend failed: ") +
                                               std::strerror(errno));
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

}  // namespace

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  const std::size_t rest = bytes.size() - i;
  if (rest > 0) {
    std::uint32_t v = bytes[i] << 16;
    if (rest == 2) v |= bytes[i + 1] << 8;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += rest == 2 ? kAlphabet[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  std::array<int, 256> lookup;
  lookup.fill(-1);
  for (std::size_t i = 0; i < kAlphabet.size(); ++i)
    lookup[static_cast<unsigned char>(kAlphabet[i])] = static_cast<int>(i);

  std::vector<std::uint8_t> out;
  std::uint32_t acc = 0;
  int bits = 0;
  for (char ch : text) {
    if (ch == '=') break;
    const int v = lookup[static_cast<unsigned char>(ch)];
    if (v < 0) throw Error(ErrorKind::ParseError, "invalid base64 character");
    acc = (acc << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<std::uint8_t>((acc >> bits) & 0xFF));
    }
  }
  return out;
}

json frame_to_json(const Frame& frame) {
  frame.validate();
  return json{{"index", frame.index},
              {"width", frame.width},
              {"height", frame.height},
              {"channels", frame.channels},
              {"pixels", base64_encode(frame.data())}};
}

Frame frame_from_json(const json& message) {
  try {
    Frame frame(message.at("index").get<std::size_t>(), message.at("width").get<int>(),
                message.at("height").get<int>(), message.at("channels").get<int>());
    const auto bytes = base64_decode(message.at("pixels").get<std::string>());
    if (static_cast<Eigen::Index>(bytes.size()) != frame.pixels.size())
      throw Error(ErrorKind::ShapeMismatch, "pixel payload does not match frame dimensions");
    std::copy(bytes.begin(), bytes.end(), frame.pixels.data());
    return frame;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("malformed frame message: ") + e.what());
  }
}

ExternalProcess::ExternalProcess(std::vector<std::string> argv) {
  if (argv.empty()) throw Error(ErrorKind::ConfigError, "empty backend command");
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0)
    throw Error(ErrorKind::BackendError, "cannot create pipes");

  pid_ = ::fork();
  if (pid_ < 0) throw Error(ErrorKind::BackendError, "fork failed");
  if (pid_ == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    std::vector<char*> args;
    for (auto& a : argv) args.push_back(a.data());
    args.push_back(nullptr);
    ::execvp(args[0], args.data());
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  // a dead child must surface as an error on write, not kill the host
  ::signal(SIGPIPE, SIG_IGN);
}

ExternalProcess::~ExternalProcess() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  if (pid_ > 0) {
    int status = 0;
    ::waitpid(pid_, &status, 0);
  }
}

json ExternalProcess::request(const json& message) {
  std::lock_guard lock(mutex_);
  json payload = message;
  payload["v"] = kRecordVersion;
  write_all(to_child_, payload.dump() + "\n");

  std::size_t newline;
  while ((newline = buffer_.find('\n')) == std::string::npos) {
    char chunk[4096];
    ssize_t n = ::read(from_child_, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw Error(ErrorKind::BackendError, "backend process closed its output");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
  const std::string line = buffer_.substr(0, newline);
  buffer_.erase(0, newline + 1);

  json response = json::parse(line, nullptr, false);
  if (response.is_discarded() || !response.is_object())
    throw Error(ErrorKind::BackendError, "backend sent malformed JSON");
  if (!response.contains("v") || response["v"] != kRecordVersion)
    throw Error(ErrorKind::BackendError, "backend protocol version mismatch");
  if (response.contains("error"))
    throw Error(ErrorKind::BackendError, "backend error: " + response["error"].dump());
  return response;
}

std::vector<Detection> ExternalDetector::detect(const Frame& frame) {
  const json response =
      process_->request({{"op", "detect"}, {"frame", frame_to_json(frame)}});
  if (!response.contains("detections") || !response["detections"].is_array())
    throw Error(ErrorKind::BackendError, "detect response lacks \"detections\"");
  std::vector<Detection> dets;
  for (json record : response["detections"]) {
    record["v"] = kRecordVersion;
    record["frame"] = frame.index;
    dets.push_back(detection_from_json(record, objects_));
  }
  return dets;
}

Verdict ExternalClassifier::classify(const SequenceWindow& window,
                                     std::span<const Frame> frames) {
  json encoded = json::array();
  for (const auto& f : frames) encoded.push_back(frame_to_json(f));
  json response = process_->request(
      {{"op", "classify"}, {"window", window.window_id}, {"frames", std::move(encoded)}});
  response["window"] = window.window_id;
  return verdict_from_json(response, labels_);
}

}  // namespace vigil
