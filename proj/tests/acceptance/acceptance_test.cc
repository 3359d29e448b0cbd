// Copyright 2026 The Anchor Motion Authors.
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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Everything runs on synthetic scenes.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "anchor_motion/anchor_align.h"
#include "anchor_motion/anchor_select.h"
#include "anchor_motion/eval_metrics.h"
#include "anchor_motion/flow_tracking.h"
#include "anchor_motion/json_io.h"
#include "anchor_motion/motion_tokens.h"
#include "anchor_motion/synth_scenes.h"
#include "test_support.h"

namespace anchor_motion {
namespace {

using Clock = std::chrono::steady_clock;
using testing::Matrix;
using testing::oracle_argmin;
using testing::oracle_fps;
using testing::random_distance_matrix;
using testing::random_token;
using testing::random_token_set;
using testing::slurp;
using testing::TempDir;
using testing::to_distance_matrix;

const fs::path kTestData = ANCHOR_MOTION_TESTDATA_DIR;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Collects failure messages for one criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++count_;
  }
  bool ok() const { return count_ == 0; }
  std::string summary() const {
    std::ostringstream s;
    s << count_ << " failure(s)";
    for (const auto& f : failures_) s << "; " << f;
    return s.str();
  }

 private:
  std::vector<std::string> failures_;
  std::size_t count_ = 0;
};

// ---------------------------------------------------------------------------

Check fps_oracle() {
  Check check;
  const auto start = Clock::now();
  std::mt19937_64 rng(2026);
  std::uniform_int_distribution<std::size_t> size(2, 50);
  const double taus[] = {0.0, 0.3, 0.65, 1.2};
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix m = random_distance_matrix(size(rng), rng);
    const double tau = taus[trial % 4];
    const AnchorSet a = fps_select(to_distance_matrix(m), tau);
    if (a.indices != oracle_fps(m, tau, kDefaultMaxAnchors)) ++mismatches;
  }
  check.expect(mismatches == 0, std::to_string(mismatches) + " mismatches");
  const double t = seconds_since(start);
  check.expect(t < 10.0, "took " + std::to_string(t) + " s");
  return check;
}

Check tau_monotonicity() {
  Check check;
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> size(2, 60);
  for (int trial = 0; trial < 50; ++trial) {
    const DistanceMatrix d = to_distance_matrix(random_distance_matrix(size(rng), rng));
    std::size_t previous = d.size() + 1;
    for (int step = 0; step < 10; ++step) {
      const double tau = 0.2 * step;
      const std::size_t count = fps_select(d, tau).size();
      check.expect(count <= previous, "L grew at tau " + std::to_string(tau));
      previous = count;
    }
  }
  return check;
}

Check distance_contract() {
  Check check;
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> frames(1, 12);
  std::uniform_int_distribution<int> channels(2, 16);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = frames(rng);
    const int c = channels(rng);
    const MotionToken a = random_token(n, c, rng);
    const MotionToken b = random_token(n, c, rng);
    const double ab = token_distance(a, b);
    check.expect(std::abs(ab - token_distance(b, a)) <= 1e-6, "asymmetric");
    check.expect(std::abs(token_distance(a, a)) <= 1e-6, "self distance");
    check.expect(ab >= 0.0 && ab <= 2.0, "out of range");

    // Frame-wise orthogonal pair: one-hot rows on adjacent axes.
    MotionToken o = a;
    for (int i = 0; i < n; ++i) {
      std::fill(o.features.begin() + static_cast<std::ptrdiff_t>(i) * c,
                o.features.begin() + static_cast<std::ptrdiff_t>(i + 1) * c, 0.0);
    }
    MotionToken e = o;
    for (int i = 0; i < n; ++i) {
      const int axis = (trial + i) % c;
      e.features[static_cast<std::size_t>(i) * c + axis] = 1.0;
      o.features[static_cast<std::size_t>(i) * c + (axis + 1) % c] = 1.0;
    }
    check.expect(std::abs(token_distance(e, o) - 1.0) <= 1e-6, "orthogonal pair not 1");
  }
  return check;
}

Check tracking_exactness() {
  Check check;
  // Slow contraction toward the grid center plus a rotation.
  AffineMotion m;
  m.a11 = -0.01;
  m.a12 = 0.02;
  m.a21 = -0.02;
  m.a22 = -0.01;
  const double cu = 31.5, cv = 31.5;
  m.tu = -(m.a11 * cu + m.a12 * cv);
  m.tv = -(m.a21 * cu + m.a22 * cv);
  const int n = 16, h = 64, w = 64;
  const FlowSequences flows = affine_flows(n, h, w, m);
  const TrajectorySet set =
      collect_trajectories(flows.forward, flows.backward, default_keyframes(n));

  // Closed form: x_i - c = M^(i - k) (x_k - c), M = I + A.
  const double m11 = 1 + m.a11, m12 = m.a12, m21 = m.a21, m22 = 1 + m.a22;
  const double det = m11 * m22 - m12 * m21;
  auto power = [&](int e, double& p11, double& p12, double& p21, double& p22) {
    double b11 = m11, b12 = m12, b21 = m21, b22 = m22;
    if (e < 0) {
      b11 = m22 / det;
      b12 = -m12 / det;
      b21 = -m21 / det;
      b22 = m11 / det;
      e = -e;
    }
    p11 = 1, p12 = 0, p21 = 0, p22 = 1;
    for (int i = 0; i < e; ++i) {
      const double q11 = p11 * b11 + p12 * b21, q12 = p11 * b12 + p12 * b22;
      const double q21 = p21 * b11 + p22 * b21, q22 = p21 * b12 + p22 * b22;
      p11 = q11, p12 = q12, p21 = q21, p22 = q22;
    }
  };
  std::size_t compared = 0;
  double worst = 0.0;
  for (const Trajectory& t : set.trajectories) {
    const double du = t.seed_cell.col - cu, dv = t.seed_cell.row - cv;
    for (int i = 0; i < n; ++i) {
      if (!t.valid[i]) continue;
      double p11, p12, p21, p22;
      power(i + 1 - t.seed_keyframe, p11, p12, p21, p22);
      const double u = cu + p11 * du + p12 * dv;
      const double v = cv + p21 * du + p22 * dv;
      worst = std::max({worst, std::abs(t.positions[i].u - u), std::abs(t.positions[i].v - v)});
      ++compared;
    }
  }
  check.expect(worst <= 1e-3, "max error " + std::to_string(worst));
  check.expect(compared > static_cast<std::size_t>(h * w * n / 2), "too few valid samples");

  FlowSequences still;
  still.forward.assign(n - 1, FlowField(w, h));
  still.backward.assign(n - 1, FlowField(w, h));
  const TrajectorySet s = collect_trajectories(still.forward, still.backward, default_keyframes(n));
  check.expect(s.trajectories.size() == static_cast<std::size_t>(h * w),
               "static scene gave " + std::to_string(s.trajectories.size()));
  return check;
}

Check trajectory_count() {
  Check check;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const int n = 9, h = 20, w = 24;
    const FlowSequences f = random_flows(n, h, w, 2.5, seed);
    const std::vector<int> keys = default_keyframes(n);
    check.expect(keys.size() == 3, "expected 3 keyframes");
    const TrajectorySet s = collect_trajectories(f.forward, f.backward, keys);
    const std::size_t bound = 3u * h * w;
    check.expect(s.candidate_count == bound, "before dedup " + std::to_string(s.candidate_count));
    check.expect(s.trajectories.size() <= bound, "after dedup exceeds bound");
  }
  return check;
}

// Runs tracking, tokens and selection in-process for a generated scene.
struct Pipeline {
  TrajectorySet trajectories;
  MotionTokenSet tokens;
  AnchorSet anchors;
  bool audit = false;
};

Pipeline run_pipeline(const SceneSpec& spec, double tau) {
  const Scene scene = generate_scene(spec);
  const int h = spec.latent_height, w = spec.latent_width;
  const auto fwd = downsample_flows(scene.forward_flows, h, w);
  const auto bwd = downsample_flows(scene.backward_flows, h, w);
  const std::vector<int> keys =
      spec.keyframes.empty() ? default_keyframes(spec.frames) : spec.keyframes;
  Pipeline p;
  p.trajectories = collect_trajectories(fwd, bwd, keys, &scene.mask);
  p.tokens = build_motion_tokens(p.trajectories, normalize_features(scene.features));
  const DistanceMatrix d = pairwise_distances(p.tokens);
  p.anchors = fps_select(d, tau);
  p.audit = audit_selection(p.anchors, d);
  return p;
}

// Blob whose support holds the cell at `frame`, or -1.
int blob_at(const SceneSpec& spec, int frame, int row, int col) {
  for (std::size_t b = 0; b < spec.blobs.size(); ++b) {
    if (in_blob(spec.blobs[b], frame, row, col)) return static_cast<int>(b);
  }
  return -1;
}

int blob_at(const SceneSpec& spec, int frame, LatentPoint p) {
  return blob_at(spec, frame, static_cast<int>(std::lround(p.v)), static_cast<int>(std::lround(p.u)));
}

Check end_to_end() {
  Check check;
  for (const auto& [file, blobs] : {std::pair{"two_blobs.json", 2u}, {"three_blobs.json", 3u}}) {
    const SceneSpec spec = scene_spec_from_json(read_json(kTestData / file));
    const auto start = Clock::now();
    const Pipeline p = run_pipeline(spec, 0.5);
    const double t = seconds_since(start);
    check.expect(p.anchors.size() == blobs,
                 std::string(file) + " gave " + std::to_string(p.anchors.size()) + " anchors");
    check.expect(p.audit, std::string(file) + " audit failed");
    std::set<int> hit;
    for (std::size_t idx : p.anchors.indices) {
      const Trajectory& tr = p.trajectories.trajectories[idx];
      const int b = blob_at(spec, tr.seed_keyframe, tr.seed_cell.row, tr.seed_cell.col);
      check.expect(b >= 0, std::string(file) + " anchor seeded outside every blob");
      hit.insert(b);
    }
    check.expect(hit.size() == blobs, std::string(file) + " two anchors share a blob");
    check.expect(t < 5.0, std::string(file) + " took " + std::to_string(t) + " s");
  }
  return check;
}

Check alignment_identity_permutation() {
  Check check;
  std::mt19937_64 rng(31);
  TrajectorySet dummy;
  dummy.frames = 5;
  dummy.height = 1;
  dummy.width = 64;
  for (int k = 0; k < 64; ++k) {
    Trajectory t;
    t.positions.assign(5, {static_cast<double>(k), 0.0});
    t.valid.assign(5, true);
    t.seed_cell = {0, k};
    dummy.trajectories.push_back(t);
  }
  std::uniform_int_distribution<std::size_t> size(2, 64);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = size(rng);
    const MotionTokenSet source = random_token_set(k, 5, 6, rng);
    TrajectorySet trajectories = dummy;
    trajectories.trajectories.resize(k);
    const AnchorSet anchors = fps_select(source, 1.0);
    const AnchorBundle bundle = make_anchor_bundle(anchors, trajectories, source);

    const AlignmentMapping same = match_anchors(bundle, source);
    for (const AnchorMatch& m : same.pairs) {
      check.expect(m.target_index == m.source_index, "identity broken");
    }

    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    MotionTokenSet permuted = source;
    for (std::size_t i = 0; i < k; ++i) permuted.tokens[perm[i]] = source.tokens[i];
    for (const AnchorMatch& m : match_anchors(bundle, permuted).pairs) {
      check.expect(m.target_index == perm[m.source_index], "permutation broken");
    }

    const MotionTokenSet target = random_token_set(size(rng), 5, 6, rng);
    const AlignmentMapping mapping = match_anchors(bundle, target);
    for (std::size_t a = 0; a < mapping.pairs.size(); ++a) {
      const std::size_t want = oracle_argmin(source.tokens[anchors.indices[a]], target);
      check.expect(mapping.pairs[a].target_index == want, "argmin oracle disagrees");
    }
  }
  return check;
}

BlobSpec make_blob(double u, double v, double du, std::vector<double> signature) {
  BlobSpec b;
  b.start = {u, v};
  b.velocity = {du, 0.0};
  b.radius = 2.0;
  b.signature = std::move(signature);
  return b;
}

Check alignment_ablation() {
  Check check;
  SceneSpec source;
  source.keyframes = {1};
  source.rng_seed = 3;
  const std::vector<double> e1{1, 0, 0, 0, 0, 0, 0, 0};
  const std::vector<double> e2{0, 1, 0, 0, 0, 0, 0, 0};
  source.blobs = {make_blob(3, 8, 1, e1), make_blob(28, 24, -1, e2)};
  // Same subjects, displaced to rows the source blobs never visit.
  SceneSpec target = source;
  target.blobs = {make_blob(3, 16, 1, e1), make_blob(28, 28, -1, e2)};

  const Pipeline src = run_pipeline(source, 0.5);
  const Pipeline tgt = run_pipeline(target, 0.5);
  const AnchorBundle bundle = make_anchor_bundle(src.anchors, src.trajectories, src.tokens);
  const InjectionSchedule aligned =
      relocate(bundle, match_anchors(bundle, tgt.tokens), tgt.trajectories);
  const InjectionSchedule unaligned = unaligned_schedule(bundle);
  check.expect(bundle.anchors.size() == 2, "expected one anchor per subject");

  std::size_t aligned_inside = 0, unaligned_inside = 0, samples = 0;
  for (std::size_t k = 0; k < bundle.anchors.size(); ++k) {
    const Trajectory& seed = bundle.anchors[k].trajectory;
    const int subject = blob_at(source, seed.seed_keyframe, seed.seed_cell.row, seed.seed_cell.col);
    check.expect(subject >= 0, "source anchor outside every subject");
    for (int i = 0; i < source.frames; ++i) {
      const Trajectory& a = aligned.anchors[k].trajectory;
      const Trajectory& u = unaligned.anchors[k].trajectory;
      if (!a.valid[i] || !u.valid[i]) continue;
      ++samples;
      if (blob_at(target, i + 1, a.positions[i]) == subject) ++aligned_inside;
      if (blob_at(target, i + 1, u.positions[i]) >= 0) ++unaligned_inside;
    }
  }
  check.expect(samples > 0, "no comparable frames");
  check.expect(aligned_inside == samples,
               "aligned inside " + std::to_string(aligned_inside) + "/" + std::to_string(samples));
  check.expect(unaligned_inside == 0,
               "unaligned inside " + std::to_string(unaligned_inside) + "/" + std::to_string(samples));
  return check;
}

Check metrics_ground_truth() {
  Check check;
  const FlowSequences f = random_flows(6, 12, 10, 3.0, 5);
  check.expect(std::abs(flow_similarity(f.forward, f.forward).value - 1.0) <= 1e-6,
               "identical flows");
  std::vector<FlowField> negated = f.forward;
  for (FlowField& g : negated) {
    for (float& x : g.u) x = -x;
    for (float& x : g.v) x = -x;
  }
  check.expect(std::abs(flow_similarity(f.forward, negated).value + 1.0) <= 1e-6,
               "antipodal flows");

  const std::vector<FlowField> zero(4, FlowField(10, 8));
  const FrameSequence constant(5, Image(10, 8, 77));
  const WarpError we = warp_error(zero, constant);
  check.expect(we.raw == 0.0 && we.scaled == 0.0, "constant video warp error");

  const std::vector<DetectionBox> gt{{0, 0, 0, 10, 10, "a"}, {0, 20, 20, 30, 30, "b"}};
  const std::vector<DetectionBox> pred{{0, 0, 0, 10, 10, "a"}};
  check.expect(std::abs(detection_f1(gt, pred).f1 - 2.0 / 3.0) <= 1e-9, "F1 not 2/3");
  const auto file_score = detection_f1(read_detection_boxes(kTestData / "gt_boxes.jsonl"),
                                       read_detection_boxes(kTestData / "pred_boxes.jsonl"));
  check.expect(std::abs(file_score.f1 - 2.0 / 3.0) <= 1e-9, "fixture F1 not 2/3");
  return check;
}

// ---------------------------------------------------------------------------
// CLI-driven criteria.

int run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " '" + std::string(ANCHOR_MOTION_CLI_PATH) + "' " + args +
                          " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Check defaults_fidelity() {
  Check check;
  check.expect(kDefaultTau == 0.65, "default tau");
  for (int n = 4; n <= 64; ++n) {
    check.expect(default_keyframes(n) == std::vector<int>{1, n / 2, n},
                 "default keyframes for N=" + std::to_string(n));
  }
  TempDir dir;
  const std::string d = dir.path().string();
  check.expect(run_cli("synth --spec " + (kTestData / "static_blob.json").string() + " --out " +
                       d + "/s") == 0,
               "synth");
  check.expect(run_cli("track --flows " + d + "/s/flows --features " + d + "/s/features.fmap --out " + d +
                       "/t") == 0, "track");
  check.expect(run_cli("select --trajectories " + d + "/t/trajectories.json --features " + d +
                       "/s/features.fmap --out " + d + "/t") == 0,
               "select");
  if (!check.ok()) return check;
  const Json traj = read_json(dir / "t/trajectories.json");
  check.expect(traj.at("candidate_count") == 3 * 8 * 8, "CLI keyframes are not {1, N/2, N}");
  check.expect(read_json(dir / "t/anchors.json").at("tau") == 0.65, "CLI tau default");
  return check;
}

void collect_files(const fs::path& root, std::map<std::string, std::vector<std::uint8_t>>& out) {
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) {
      out[fs::relative(entry.path(), root).string()] = slurp(entry.path());
    }
  }
}

// Every subcommand into `root`; returns the first failing step or "".
std::string run_all_commands(const fs::path& root, const std::string& env) {
  const std::string r = root.string();
  const std::string scene = r + "/scene";
  const std::string steps[] = {
      "synth --spec " + (kTestData / "two_blobs.json").string() + " --out " + scene,
      "track --flows " + scene + "/flows --features " + scene + "/features.fmap --mask " +
          scene + "/mask.pgm --frames " + scene + "/frames --out " + r + "/track",
      "select --trajectories " + r + "/track/trajectories.json --features " + scene +
          "/features.fmap --tau 0.5 --out " + r + "/fps",
      "select --trajectories " + r + "/track/trajectories.json --features " + scene +
          "/features.fmap --strategy random --seed 9 --out " + r + "/random",
      "select --trajectories " + r + "/track/trajectories.json --features " + scene +
          "/features.fmap --strategy external-feature --external-features " + scene +
          "/features.fmap --out " + r + "/external",
      "align --anchors " + r + "/fps/anchors.json --target-features " + scene +
          "/features.fmap --target-trajectories " + r + "/track/trajectories.json --out " + r +
          "/aligned",
      "align --anchors " + r + "/fps/anchors.json --no-align --out " + r + "/unaligned",
      "metrics --src-flows " + scene + "/flows --edit-flows " + scene + "/flows --edit-frames " +
          scene + "/frames --gt-boxes " + (kTestData / "gt_boxes.jsonl").string() +
          " --pred-boxes " + (kTestData / "pred_boxes.jsonl").string() + " --out " + r +
          "/metrics",
  };
  for (const std::string& step : steps) {
    if (run_cli(step, env) != 0) return step.substr(0, step.find(' '));
  }
  return "";
}

Check determinism() {
  Check check;
  TempDir dir;
  std::map<std::string, std::map<std::string, std::vector<std::uint8_t>>> outputs;
  for (const auto& [name, env] : {std::pair{"t1a", "ANCHOR_MOTION_THREADS=1"},
                                  {"t1b", "ANCHOR_MOTION_THREADS=1"},
                                  {"t8", "ANCHOR_MOTION_THREADS=8"}}) {
    const std::string failed = run_all_commands(dir / name, env);
    check.expect(failed.empty(), std::string(name) + ": " + failed + " failed");
    collect_files(dir / name, outputs[name]);
  }
  const auto& reference = outputs["t1a"];
  check.expect(reference.size() > 20, "too few output files");
  for (const char* other : {"t1b", "t8"}) {
    const auto& files = outputs[other];
    check.expect(files.size() == reference.size(), std::string(other) + " file set differs");
    for (const auto& [path, bytes] : reference) {
      const auto it = files.find(path);
      check.expect(it != files.end() && it->second == bytes,
                   std::string(other) + " differs at " + path);
    }
  }
  return check;
}

}  // namespace
}  // namespace anchor_motion

int main() {
  using namespace anchor_motion;
  const std::pair<const char*, std::function<Check()>> criteria[] = {
      {"fps-oracle-equivalence", fps_oracle},
      {"tau-monotonicity", tau_monotonicity},
      {"distance-contract", distance_contract},
      {"tracking-exactness", tracking_exactness},
      {"trajectory-count-bound", trajectory_count},
      {"end-to-end-anchor-recovery", end_to_end},
      {"alignment-identity-permutation", alignment_identity_permutation},
      {"alignment-ablation-direction", alignment_ablation},
      {"metrics-ground-truth", metrics_ground_truth},
      {"defaults-fidelity", defaults_fidelity},
      {"cli-determinism", determinism},
  };
  const auto start = Clock::now();
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Check result;
    const auto t0 = Clock::now();
    try {
      result = run();
    } catch (const std::exception& e) {
      result.expect(false, std::string("threw: ") + e.what());
    }
    const double t = seconds_since(t0);
    std::printf("%s %s (%.2f s)%s%s\n", result.ok() ? "PASS" : "FAIL", name, t,
                result.ok() ? "" : ": ", result.ok() ? "" : result.summary().c_str());
    if (!result.ok()) ++failed;
  }
  const double total = seconds_since(start);
  const bool fast = total < 120.0;
  std::printf("%s total-runtime-under-2-minutes (%.2f s)\n", fast ? "PASS" : "FAIL", total);
  if (!fast) ++failed;
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
