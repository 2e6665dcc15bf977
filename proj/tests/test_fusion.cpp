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

#include <algorithm>
#include <mutex>
#include <random>
#include <thread>

#include <vigil/fusion.hpp>
#include <vigil/preprocess.hpp>
#include <vigil/windowing.hpp>

#include "oracles.hpp"

using namespace vigil;

namespace {

const LabelRegistry kLabels = default_label_registry();

Verdict verdict(const ClassLabel& label, std::size_t window = 0) {
  return certain_verdict(window, kLabels, label);
}

FusionConfig config(RuleVariant variant = RuleVariant::ReduceFalseNegatives) {
  FusionConfig c;
  c.rule_variant = variant;
  return c;
}

std::vector<Frame> frames(std::size_t n, int w = 32, int h = 24, int c = 3, std::uint8_t fill = 90) {
  std::vector<Frame> out;
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(i, w, h, c, fill);
  return out;
}

std::vector<SequenceWindow> sliding(std::size_t n) {
  WindowSpec s;
  s.mode = WindowGenerator::Sliding;
  return generate_windows(s, n);
}

FunctionClassifier always(const ClassLabel& label) {
  return FunctionClassifier([label](const SequenceWindow& w, std::span<const Frame>) {
    return certain_verdict(w.window_id, kLabels, label);
  });
}

}  // namespace

TEST(CorrectVerdict, PublishedExamples) {
  const auto dict = KeyObjectDictionary::defaults();
  auto a = correct_verdict(verdict(labels::fire), {}, config(), dict);
  EXPECT_EQ(a.final_class, labels::fire);
  EXPECT_EQ(a.rule, RuleKind::None);

  const std::vector<Detection> flame = {{Box{0, 0, 3, 3}, objects::flame, 0.60, 0}};
  a = correct_verdict(verdict(labels::normal), flame, config(), dict);
  EXPECT_EQ(a.final_class, labels::fire);
  EXPECT_EQ(rule_name(a), "KeyObjectFire");
  EXPECT_EQ(a.supporting_detections, flame);

  const std::vector<Detection> lone_gun = {{Box{0, 0, 4, 4}, objects::firearm, 0.9, 0}};
  EXPECT_EQ(correct_verdict(verdict(labels::normal), lone_gun, config(), dict).final_class,
            labels::normal);

  const std::vector<Detection> held = {{Box{0, 0, 4, 4}, objects::firearm, 0.9, 0},
                                       {Box{2, 2, 4, 4}, objects::person, 0.8, 0}};
  a = correct_verdict(verdict(labels::normal), held, config(), dict);
  EXPECT_EQ(a.final_class, labels::gunshot);
  EXPECT_EQ(rule_name(a), "KeyObjectGunshot");
  EXPECT_EQ(a.supporting_detections.size(), 2u);

  a = correct_verdict(verdict(labels::fire), {}, config(RuleVariant::ReduceFalsePositives), dict);
  EXPECT_EQ(a.final_class, labels::normal);
  EXPECT_EQ(rule_name(a), "FpVetoFire");
  EXPECT_EQ(a.original_class, labels::fire);
}

TEST(CorrectVerdict, ThresholdIsInclusive) {
  const auto dict = KeyObjectDictionary::defaults();
  const std::vector<Detection> at = {{Box{0, 0, 3, 3}, objects::flame, 0.55, 0}};
  const std::vector<Detection> below = {{Box{0, 0, 3, 3}, objects::flame, 0.5499, 0}};
  EXPECT_EQ(correct_verdict(verdict(labels::normal), at, config(), dict).final_class, labels::fire);
  EXPECT_EQ(correct_verdict(verdict(labels::normal), below, config(), dict).final_class, labels::normal);
}

TEST(CorrectVerdict, PersonBelowThresholdDoesNotCount) {
  const std::vector<Detection> d = {{Box{0, 0, 4, 4}, objects::firearm, 0.9, 0},
                                    {Box{2, 2, 4, 4}, objects::person, 0.3, 0}};
  EXPECT_EQ(correct_verdict(verdict(labels::normal), d, config(), KeyObjectDictionary::defaults()).final_class,
            labels::normal);
}

TEST(CorrectVerdict, TouchingBoxesNeedTheFlag) {
  const std::vector<Detection> d = {{Box{0, 0, 4, 4}, objects::firearm, 0.9, 0},
                                    {Box{4, 0, 4, 4}, objects::person, 0.8, 0}};
  auto cfg = config();
  const auto dict = KeyObjectDictionary::defaults();
  EXPECT_EQ(correct_verdict(verdict(labels::normal), d, cfg, dict).final_class, labels::normal);
  cfg.touch_counts = true;
  EXPECT_EQ(correct_verdict(verdict(labels::normal), d, cfg, dict).final_class, labels::gunshot);
}

TEST(CorrectVerdict, ContactMustBeOnTheSameFrame) {
  const std::vector<Detection> d = {{Box{0, 0, 4, 4}, objects::firearm, 0.9, 3},
                                    {Box{2, 2, 4, 4}, objects::person, 0.8, 4}};
  EXPECT_EQ(correct_verdict(verdict(labels::normal), d, config(), KeyObjectDictionary::defaults()).final_class,
            labels::normal);
}

TEST(CorrectVerdict, DiouGateIsStricterThanIou) {
  // IoU 1/9 but the centre penalty outweighs it: diou < 0.
  const std::vector<Detection> d = {{Box{0, 0, 10, 2}, objects::firearm, 0.9, 0},
                                    {Box{8, 0, 10, 2}, objects::person, 0.8, 0}};
  auto cfg = config();
  const auto dict = KeyObjectDictionary::defaults();
  EXPECT_EQ(correct_verdict(verdict(labels::normal), d, cfg, dict).final_class, labels::gunshot);
  cfg.iou_gate = IouGate::DIoU;
  EXPECT_EQ(correct_verdict(verdict(labels::normal), d, cfg, dict).final_class, labels::normal);
}

TEST(CorrectVerdict, FlameTakesPrecedenceOverFirearm) {
  const auto d = oracle::truth_table_dets(true, true, 0);
  const auto a = correct_verdict(verdict(labels::normal), d, config(), KeyObjectDictionary::defaults());
  EXPECT_EQ(a.final_class, labels::fire);
}

TEST(CorrectVerdict, TruthTable) {
  const ClassLabel preds[] = {labels::fight, labels::gunshot, labels::fire, labels::normal};
  const auto dict = KeyObjectDictionary::defaults();
  int cases = 0;
  for (const auto& p : preds)
    for (int flame = 0; flame < 2; ++flame)
      for (int gun = 0; gun < 2; ++gun)
        for (int person = 0; person < 3; ++person)
          for (bool fp : {false, true})
            for (auto gate : {IouGate::PlainIoU, IouGate::DIoU}) {
              auto cfg = config(fp ? RuleVariant::ReduceFalsePositives : RuleVariant::ReduceFalseNegatives);
              cfg.iou_gate = gate;
              const auto a = correct_verdict(verdict(p), oracle::truth_table_dets(flame, gun, person), cfg, dict);
              EXPECT_EQ(a.final_class, oracle::expected_class(p, flame, gun, person, fp))
                  << p.str() << flame << gun << person << fp;
              ++cases;
            }
  EXPECT_EQ(cases, 192);
}

TEST(CorrectVerdict, NonNormalDominatesAndIsMonotone) {
  std::mt19937_64 rng(9);
  const ObjectClass classes[] = {objects::flame, objects::firearm, objects::person};
  const auto dict = KeyObjectDictionary::defaults();
  for (int t = 0; t < 200; ++t) {
    std::vector<Detection> d;
    for (int i = 0; i < 5; ++i)
      d.push_back({oracle::quantized_box(rng), classes[rng() % 3], double(rng() % 100) / 100.0, 0});
    for (const auto& p : {labels::fight, labels::gunshot, labels::fire})
      EXPECT_EQ(correct_verdict(verdict(p), d, config(), dict).final_class, p);
    // Adding detections never turns a non-normal alert back to normal.
    const auto before = correct_verdict(verdict(labels::normal), std::span(d).first(3), config(), dict);
    const auto after = correct_verdict(verdict(labels::normal), d, config(), dict);
    if (before.final_class != labels::normal) EXPECT_NE(after.final_class, labels::normal);
  }
}

TEST(Dictionary, Validation) {
  const auto objects = default_object_registry();
  EXPECT_THROW(KeyObjectDictionary({{objects::person, labels::fight, false}}, kLabels, objects), Error);
  EXPECT_THROW(KeyObjectDictionary({{objects::flame, labels::normal, false}}, kLabels, objects), Error);
  EXPECT_THROW(KeyObjectDictionary({{ObjectClass{"knife"}, labels::fight, false}}, kLabels, objects), Error);
  const KeyObjectDictionary custom({{objects::firearm, labels::fight, false}}, kLabels, objects);
  const std::vector<Detection> d = {{Box{0, 0, 4, 4}, objects::firearm, 0.9, 0}};
  EXPECT_EQ(correct_verdict(verdict(labels::normal), d, config(), custom).final_class, labels::fight);
}

TEST(Parallel, NoDetectionsKeepsScriptedVerdicts) {
  const auto fs = frames(60);
  NullDetector det;
  auto cls = always(labels::normal);
  const auto alerts = run_parallel(fs, sliding(60), det, cls, config());
  ASSERT_EQ(alerts.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(alerts[i].window_id, i);
    EXPECT_EQ(alerts[i].final_class, labels::normal);
  }
}

TEST(Parallel, FrameSkip) {
  const auto fs = frames(20);
  FunctionDetector det([](const Frame& f) {
    std::vector<Detection> d;
    if (f.index == 5) d.push_back({Box{1, 1, 4, 4}, objects::flame, 0.8, 5});
    return d;
  });
  auto cls = always(labels::normal);
  auto cfg = config();
  EXPECT_EQ(run_parallel(fs, sliding(20), det, cls, cfg)[0].final_class, labels::fire);
  cfg.frame_skip = 10;  // positions 0 and 10 only
  EXPECT_EQ(run_parallel(fs, sliding(20), det, cls, cfg)[0].final_class, labels::normal);
  cfg.frame_skip = 5;  // positions 0, 5, 10, 15
  EXPECT_EQ(run_parallel(fs, sliding(20), det, cls, cfg)[0].final_class, labels::fire);
}

TEST(Parallel, DetectorSeesEverySkippedFrameOnce) {
  const auto fs = frames(40);
  std::vector<std::size_t> seen;
  std::mutex m;
  FunctionDetector det([&](const Frame& f) {
    std::lock_guard lock(m);
    seen.push_back(f.index);
    return std::vector<Detection>{};
  });
  auto cls = always(labels::normal);
  auto cfg = config();
  cfg.frame_skip = 3;
  run_parallel(fs, sliding(40), det, cls, cfg);
  std::sort(seen.begin(), seen.end());
  const std::vector<std::size_t> expected = {0, 3, 6, 9, 12, 15, 18, 20, 23, 26, 29, 32, 35, 38};
  EXPECT_EQ(seen, expected);
}

TEST(Parallel, ClassifierGetsResizedFrames) {
  const auto fs = frames(20, 50, 30);
  NullDetector det;
  FunctionClassifier cls([](const SequenceWindow& w, std::span<const Frame> in) {
    EXPECT_EQ(in.size(), 20u);
    for (const auto& f : in) EXPECT_EQ(f.width, 112);
    return certain_verdict(w.window_id, kLabels, labels::normal);
  });
  run_parallel(fs, sliding(20), det, cls, config());
}

TEST(Parallel, BackendErrorsCarryWindowContext) {
  const auto fs = frames(40);
  FunctionDetector det([](const Frame& f) -> std::vector<Detection> {
    if (f.index == 25) throw Error(ErrorKind::BackendError, "boom");
    return {};
  });
  auto cls = always(labels::normal);
  try {
    run_parallel(fs, sliding(40), det, cls, config());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BackendError);
    EXPECT_NE(std::string(e.what()).find("window 1"), std::string::npos) << e.what();
  }
}

TEST(Parallel, AlertOrderIndependentOfScheduling) {
  const auto fs = frames(200);
  FunctionDetector det([](const Frame& f) {
    std::this_thread::sleep_for(std::chrono::microseconds((f.index * 37) % 200));
    return std::vector<Detection>{};
  });
  FunctionClassifier cls([](const SequenceWindow& w, std::span<const Frame>) {
    return certain_verdict(w.window_id, kLabels, w.window_id % 2 ? labels::fight : labels::normal);
  });
  const auto alerts = run_parallel(fs, sliding(200), det, cls, config());
  ASSERT_EQ(alerts.size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_EQ(alerts[i].window_id, i);
    EXPECT_EQ(alerts[i].final_class, i % 2 ? labels::fight : labels::normal);
  }
}

TEST(Serial, NullDetectorPreservesVerdicts) {
  const auto fs = frames(40);
  NullDetector det;
  FunctionClassifier cls([](const SequenceWindow& w, std::span<const Frame>) {
    return certain_verdict(w.window_id, kLabels, w.window_id ? labels::fire : labels::fight);
  });
  auto cfg = config();
  cfg.mode = FusionMode::Serial;
  const auto alerts = run_serial(fs, sliding(40), det, cls, cfg, SerialPreprocess::MaskOriginal);
  ASSERT_EQ(alerts.size(), 2u);
  EXPECT_EQ(alerts[0].final_class, labels::fight);
  EXPECT_EQ(alerts[1].final_class, labels::fire);
  for (const auto& a : alerts) EXPECT_EQ(a.rule, RuleKind::None);
}

TEST(Serial, MaskBlackHidesEverythingWithoutDetections) {
  const auto fs = frames(20);
  NullDetector det;
  FunctionClassifier cls([](const SequenceWindow& w, std::span<const Frame> in) {
    for (const auto& f : in) EXPECT_TRUE((f.pixels == 0).all());
    return certain_verdict(w.window_id, kLabels, labels::normal);
  });
  run_serial(fs, sliding(20), det, cls, config(), SerialPreprocess::MaskBlack);
}

TEST(Serial, DrawBoxesChangesOnlyThePerimeter) {
  // Frames already at classifier size so the resize is the identity.
  const auto fs = frames(20, 112, 112, 3, 90);
  FunctionDetector det([](const Frame& f) {
    return std::vector<Detection>{{Box{10, 10, 20, 30}, objects::person, 0.9, f.index}};
  });
  FunctionClassifier cls([&](const SequenceWindow& w, std::span<const Frame> in) {
    for (std::size_t i = 0; i < in.size(); ++i) {
      const auto expected = draw_boxes(fs[i], std::vector<Detection>{{Box{10, 10, 20, 30}, objects::person, 0.9, i}});
      EXPECT_TRUE(same_pixels(in[i], expected));
      int changed = 0;
      for (int y = 0; y < 112; ++y)
        for (int x = 0; x < 112; ++x) changed += in[i].at(x, y, 0) != 90 || in[i].at(x, y, 1) != 90;
      EXPECT_EQ(changed, 2 * 20 + 2 * 30 - 4);
    }
    return certain_verdict(w.window_id, kLabels, labels::normal);
  });
  auto cfg = config();
  cfg.mode = FusionMode::Serial;
  run_serial(fs, sliding(20), det, cls, cfg, SerialPreprocess::DrawBoxes);
}

TEST(Binary, CollapsePreservesOrder) {
  std::vector<Alert> alerts(3);
  alerts[0].final_class = labels::fire;
  alerts[1].final_class = labels::normal;
  alerts[2].final_class = labels::fight;
  for (std::size_t i = 0; i < 3; ++i) {
    alerts[i].window_id = i;
    alerts[i].original_class = alerts[i].final_class;
  }
  auto cfg = config();
  cfg.class_mode = ClassMode::Binary;
  const auto out = binary_alerts(alerts, cfg);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].final_class, labels::abnormal);
  EXPECT_EQ(out[1].final_class, labels::normal);
  EXPECT_EQ(out[2].final_class, labels::abnormal);
  EXPECT_EQ(out[2].window_id, 2u);
  cfg.class_mode = ClassMode::MultiClass;
  EXPECT_EQ(binary_alerts(alerts, cfg)[0].final_class, labels::fire);
}

TEST(Binary, PipelineEmitsTwoClassAlerts) {
  const auto fs = frames(20);
  NullDetector det;
  auto cls = always(labels::gunshot);
  auto cfg = config();
  cfg.class_mode = ClassMode::Binary;
  EXPECT_EQ(run_parallel(fs, sliding(20), det, cls, cfg)[0].final_class, labels::abnormal);
}
