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

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include <vigil/backends.hpp>
#include <vigil/jsonl.hpp>

using namespace vigil;

namespace {

const LabelRegistry kLabels = default_label_registry();
const ObjectRegistry kObjects = default_object_registry();

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::IoError;
}

SequenceWindow window(std::size_t id, std::vector<std::size_t> idx) {
  return {std::move(idx), WindowGenerator::Sliding, id};
}

}  // namespace

TEST(Jsonl, DetectionRoundTrip) {
  const Detection d{Box{1.5, 2, 3, 4.25}, objects::flame, 0.75, 9};
  EXPECT_EQ(detection_from_json(detection_to_json(d), kObjects), d);
}

TEST(Jsonl, RejectsBadRecordsWithLineNumbers) {
  std::istringstream in(
      "{\"v\":1,\"frame\":0,\"class\":\"flame\",\"conf\":0.9,\"box\":[0,0,2,2]}\n"
      "\n"
      "{\"v\":1,\"frame\":1,\"class\":\"flame\",\"conf\":1.4,\"box\":[0,0,2,2]}\n");
  try {
    read_detections(in, kObjects);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  std::istringstream broken("{\"v\":1,\"frame\":0\n");
  try {
    read_jsonl(broken);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
  std::istringstream zero("{\"v\":1,\"frame\":0,\"class\":\"flame\",\"conf\":0.5,\"box\":[0,0,0,2]}\n");
  EXPECT_THROW(read_detections(zero, kObjects), ParseError);
  std::istringstream knife("{\"v\":1,\"frame\":0,\"class\":\"knife\",\"conf\":0.5,\"box\":[0,0,1,2]}\n");
  EXPECT_EQ(kind_of([&] { read_detections(knife, kObjects); }), ErrorKind::UnknownClass);
}

TEST(Jsonl, GroundTruthConfidenceOptional) {
  std::istringstream in("{\"v\":1,\"frame\":4,\"class\":\"person\",\"box\":[0,0,2,2]}\n");
  const auto d = read_detections(in, kObjects, false);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_DOUBLE_EQ(d[0].confidence, 1.0);
}

TEST(Replay, RoundTripReproducesOutputs) {
  ReplayScript s;
  s.detections[0] = {{Box{0, 0, 4, 4}, objects::firearm, 0.9, 0}};
  s.detections[3] = {{Box{1, 1, 2, 2}, objects::flame, 0.6, 3}, {Box{5, 5, 2, 2}, objects::person, 0.8, 3}};
  s.verdicts[1] = make_verdict(1, kLabels, {{labels::fire, 0.7}, {labels::normal, 0.3}});

  std::stringstream buf;
  write_replay(buf, s);
  const auto back = std::make_shared<ReplayScript>(parse_replay(buf, kLabels, kObjects));

  ReplayDetector det(back);
  ReplayClassifier cls(back, kLabels);
  for (std::size_t i = 0; i < 5; ++i) {
    const Frame f(i, 8, 8, 1);
    const auto expected = s.detections.count(i) ? s.detections.at(i) : std::vector<Detection>{};
    EXPECT_EQ(det.detect(f), expected);
  }
  EXPECT_EQ(cls.classify(window(1, {0, 1}), {}).predicted, labels::fire);
  EXPECT_EQ(cls.classify(window(2, {0, 1}), {}).predicted, labels::normal);
}

TEST(Replay, EmptyFileAndRecordOrder) {
  std::istringstream empty("");
  EXPECT_TRUE(parse_replay(empty, kLabels, kObjects).empty());

  std::istringstream two(
      "{\"v\":1,\"frame\":2,\"class\":\"person\",\"conf\":0.7,\"box\":[5,5,4,4]}\n"
      "{\"v\":1,\"frame\":2,\"class\":\"flame\",\"conf\":0.6,\"box\":[1,1,4,4]}\n");
  const auto s = parse_replay(two, kLabels, kObjects);
  const auto d = replay_detect(s, Frame(2, 8, 8, 1));
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[0].object_class, objects::person);
  EXPECT_EQ(d[1].object_class, objects::flame);
  EXPECT_TRUE(replay_detect(s, Frame(3, 8, 8, 1)).empty());
}

TEST(Replay, VerdictsAndFallback) {
  std::istringstream bad("{\"v\":1,\"window\":0,\"dist\":{\"fire\":0.5,\"normal\":0.4}}\n");
  EXPECT_THROW(parse_replay(bad, kLabels, kObjects), ParseError);
  std::istringstream conf("{\"v\":1,\"frame\":0,\"class\":\"flame\",\"conf\":1.5,\"box\":[1,1,4,4]}\n");
  EXPECT_THROW(parse_replay(conf, kLabels, kObjects), ParseError);

  const ReplayScript empty;
  const auto v = replay_classify(empty, window(4, {0}), kLabels, labels::normal);
  EXPECT_EQ(v.window_id, 4u);
  EXPECT_DOUBLE_EQ(v.probability(labels::normal), 1.0);
}

TEST(Replay, DuplicateWindowIsAParseError) {
  std::istringstream in(
      "{\"v\":1,\"window\":0,\"dist\":{\"normal\":1}}\n"
      "{\"v\":1,\"window\":0,\"dist\":{\"fire\":1}}\n");
  EXPECT_THROW(parse_replay(in, kLabels, kObjects), ParseError);
}

TEST(Contracts, DetectorMustReportItsFrame) {
  FunctionDetector bad([](const Frame&) {
    return std::vector<Detection>{{Box{0, 0, 1, 1}, objects::flame, 0.9, 42}};
  });
  EXPECT_EQ(kind_of([&] { checked_detect(bad, Frame(0, 4, 4, 1)); }), ErrorKind::BackendError);
  FunctionClassifier wrong_id([](const SequenceWindow&, std::span<const Frame>) {
    return certain_verdict(99, kLabels, labels::normal);
  });
  EXPECT_EQ(kind_of([&] { checked_classify(wrong_id, window(0, {0}), {}); }),
            ErrorKind::BackendError);
}

TEST(Base64, RoundTrip) {
  std::mt19937_64 rng(8);
  for (std::size_t n = 0; n < 20; ++n) {
    std::vector<std::uint8_t> bytes(n);
    for (auto& b : bytes) b = std::uint8_t(rng());
    EXPECT_EQ(base64_decode(base64_encode(bytes)), bytes);
  }
  EXPECT_EQ(base64_encode(std::vector<std::uint8_t>{'M', 'a', 'n'}), "TWFu");
}

TEST(ExternalProcess, DetectAndClassify) {
  auto proc = std::make_shared<ExternalProcess>(std::vector<std::string>{FAKE_BACKEND});
  ExternalDetector det(proc, kObjects);
  ExternalClassifier cls(proc, kLabels);

  const auto dets = det.detect(Frame(5, 8, 8, 3, 7));
  ASSERT_EQ(dets.size(), 1u);
  EXPECT_EQ(dets[0].object_class, objects::flame);
  EXPECT_EQ(dets[0].frame_index, 5u);
  EXPECT_DOUBLE_EQ(dets[0].box.x, 7.0);

  const std::vector<Frame> frames = {Frame(0, 8, 8, 1), Frame(1, 8, 8, 1)};
  EXPECT_EQ(cls.classify(window(3, {0, 1}), frames).predicted, labels::fire);
  EXPECT_EQ(cls.classify(window(4, {0, 1}), frames).predicted, labels::normal);

  EXPECT_EQ(kind_of([&] { det.detect(Frame(0, 13, 4, 1)); }), ErrorKind::BackendError);
  // The process survives an error reply.
  EXPECT_EQ(det.detect(Frame(1, 8, 8, 1, 3)).at(0).box.x, 3.0);
}

TEST(ExternalProcess, MissingExecutable) {
  EXPECT_THROW(
      {
        ExternalProcess p({"/nonexistent/backend"});
        p.request({{"op", "detect"}});
      },
      Error);
}
