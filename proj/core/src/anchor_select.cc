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

#include "anchor_motion/anchor_select.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <unordered_set>

#include "anchor_motion/error.h"
#include "anchor_motion/parallel.h"

namespace anchor_motion {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_parameters(double tau, std::size_t l_max) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    fail(ErrorCode::kValidation, "tau must be a finite non-negative number");
  }
  if (l_max < 1) fail(ErrorCode::kValidation, "l_max must be at least 1");
}

// Row sums accumulated in column order so every distance source yields the
// same bits.
template <typename DistFn>
std::vector<double> row_sums(std::size_t k, const DistFn& dist, std::size_t grain) {
  std::vector<double> sums(k, 0.0);
  parallel_for(
      k,
      [&](std::size_t i) {
        double s = 0.0;
        for (std::size_t j = 0; j < k; ++j) s += dist(i, j);
        sums[i] = s;
      },
      std::max<std::size_t>(1, grain / std::max<std::size_t>(k, 1)));
  return sums;
}

std::size_t argmax_lowest(const std::vector<double>& values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

template <typename DistFn>
AnchorSet greedy_select(std::size_t k, const DistFn& dist, double tau,
                        std::size_t l_max, std::size_t grain) {
  check_parameters(tau, l_max);
  AnchorSet out;
  out.tau = tau;
  out.l_max = l_max;
  out.seed_rule = std::string(kSeedRuleMaxRowSum);

  const std::size_t seed = argmax_lowest(row_sums(k, dist, grain));
  out.indices.push_back(seed);

  std::vector<char> selected(k, 0);
  selected[seed] = 1;
  std::vector<double> min_dist(k, kInf);
  std::size_t last = seed;
  while (true) {
    if (out.indices.size() >= k) {
      out.stop_reason = StopReason::kExhausted;
      break;
    }
    if (out.indices.size() >= l_max) {
      out.stop_reason = StopReason::kMaxAnchors;
      break;
    }
    parallel_for(
        k,
        [&](std::size_t i) {
          if (!selected[i]) min_dist[i] = std::min(min_dist[i], dist(i, last));
        },
        grain);
    std::size_t best = k;
    for (std::size_t i = 0; i < k; ++i) {
      if (selected[i]) continue;
      if (best == k || min_dist[i] > min_dist[best]) best = i;
    }
    if (min_dist[best] < tau) {
      out.stop_reason = StopReason::kThreshold;
      break;
    }
    selected[best] = 1;
    out.indices.push_back(best);
    last = best;
  }
  return out;
}

template <typename DistFn>
bool audit_impl(const AnchorSet& anchors, std::size_t k, const DistFn& dist,
                std::size_t grain) {
  const auto& idx = anchors.indices;
  if (idx.empty() || idx.size() > k || idx.size() > anchors.l_max) return false;
  if (!(anchors.tau >= 0.0)) return false;
  std::unordered_set<std::size_t> unique(idx.begin(), idx.end());
  if (unique.size() != idx.size()) return false;
  if (std::any_of(idx.begin(), idx.end(), [&](std::size_t i) { return i >= k; })) {
    return false;
  }
  if (idx.front() != argmax_lowest(row_sums(k, dist, grain))) return false;

  // Recompute every step from scratch against the selected prefix.
  auto next_candidate = [&](std::size_t prefix, double& best_min) {
    std::size_t best = k;
    best_min = -kInf;
    for (std::size_t i = 0; i < k; ++i) {
      if (std::find(idx.begin(), idx.begin() + prefix, i) != idx.begin() + prefix) continue;
      double m = kInf;
      for (std::size_t p = 0; p < prefix; ++p) m = std::min(m, dist(i, idx[p]));
      if (best == k || m > best_min) {
        best = i;
        best_min = m;
      }
    }
    return best;
  };

  for (std::size_t step = 1; step < idx.size(); ++step) {
    double best_min = 0.0;
    if (next_candidate(step, best_min) != idx[step] || best_min < anchors.tau) {
      return false;
    }
  }
  if (idx.size() < std::min(k, anchors.l_max)) {
    double best_min = 0.0;
    next_candidate(idx.size(), best_min);
    if (!(best_min < anchors.tau)) return false;
  }
  return true;
}

// Distance evaluations per worker before a loop is split across threads.
constexpr std::size_t kMatrixGrain = 1 << 16;
constexpr std::size_t kTokenGrain = 64;

auto token_distance_fn(const MotionTokenSet& tokens) {
  return [&tokens](std::size_t i, std::size_t j) {
    return i == j ? 0.0 : token_distance(tokens.tokens[i], tokens.tokens[j]);
  };
}

auto matrix_distance_fn(const DistanceMatrix& dist) {
  return [&dist](std::size_t i, std::size_t j) { return dist.at(i, j); };
}

}  // namespace

std::string_view stop_reason_name(StopReason reason) {
  switch (reason) {
    case StopReason::kThreshold:
      return "threshold";
    case StopReason::kMaxAnchors:
      return "l_max";
    case StopReason::kExhausted:
      return "exhausted";
  }
  return "unknown";
}

void validate_distance_matrix(const DistanceMatrix& dist) {
  const std::size_t k = dist.size();
  if (k == 0) fail(ErrorCode::kValidation, "distance matrix is empty");
  for (std::size_t i = 0; i < k; ++i) {
    if (!std::isfinite(dist.at(i, i)) ||
        std::abs(dist.at(i, i)) > kDistanceMatrixTolerance) {
      fail(ErrorCode::kValidation, "distance matrix diagonal is not zero");
    }
    for (std::size_t j = i + 1; j < k; ++j) {
      const double a = dist.at(i, j);
      const double b = dist.at(j, i);
      if (!std::isfinite(a) || !std::isfinite(b)) {
        fail(ErrorCode::kValidation, "distance matrix has non-finite entries");
      }
      if (std::abs(a - b) > kDistanceMatrixTolerance) {
        fail(ErrorCode::kValidation, "distance matrix is not symmetric");
      }
    }
  }
}

AnchorSet fps_select(const DistanceMatrix& dist, double tau, std::size_t l_max) {
  validate_distance_matrix(dist);
  return greedy_select(dist.size(), matrix_distance_fn(dist), tau, l_max, kMatrixGrain);
}

AnchorSet fps_select(const MotionTokenSet& tokens, double tau, std::size_t l_max) {
  if (tokens.size() == 0) fail(ErrorCode::kValidation, "token set is empty");
  return greedy_select(tokens.size(), token_distance_fn(tokens), tau, l_max, kTokenGrain);
}

bool audit_selection(const AnchorSet& anchors, const DistanceMatrix& dist) {
  if (dist.size() == 0) return false;
  return audit_impl(anchors, dist.size(), matrix_distance_fn(dist), kMatrixGrain);
}

bool audit_selection(const AnchorSet& anchors, const MotionTokenSet& tokens) {
  if (tokens.size() == 0) return false;
  return audit_impl(anchors, tokens.size(), token_distance_fn(tokens), kTokenGrain);
}

AnchorSet random_select(std::size_t token_count, std::size_t count, std::uint64_t seed) {
  if (token_count == 0) fail(ErrorCode::kValidation, "token set is empty");
  count = std::clamp<std::size_t>(count, 1, token_count);
  std::vector<std::size_t> order(token_count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // mt19937_64 output is fully specified, so draws match across platforms.
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (token_count - i));
    std::swap(order[i], order[j]);
  }
  AnchorSet out;
  out.indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count));
  out.seed_rule = std::string(kSeedRuleRandom);
  out.l_max = count;
  out.stop_reason = StopReason::kMaxAnchors;
  return out;
}

AnchorBundle make_anchor_bundle(const AnchorSet& anchors,
                                const TrajectorySet& trajectories,
                                const MotionTokenSet& tokens) {
  if (trajectories.trajectories.size() != tokens.size()) {
    fail(ErrorCode::kValidation, "token set does not match the trajectory set");
  }
  AnchorBundle bundle;
  bundle.frames = trajectories.frames;
  bundle.height = trajectories.height;
  bundle.width = trajectories.width;
  bundle.channels = tokens.channels;
  bundle.tau = anchors.tau;
  bundle.l_max = anchors.l_max;
  bundle.seed_rule = anchors.seed_rule;
  for (std::size_t index : anchors.indices) {
    if (index >= tokens.size()) fail(ErrorCode::kValidation, "anchor index out of range");
    bundle.anchors.push_back({index, trajectories.trajectories[index], tokens.tokens[index]});
  }
  return bundle;
}

}  // namespace anchor_motion
