// Copyright 2026 The LOA Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Randomized drivers whose violation counts are asserted by the unit tests
// and reported by the acceptance runner.

#ifndef LOA_TESTS_PROPERTIES_HPP_
#define LOA_TESTS_PROPERTIES_HPP_

#include <algorithm>
#include <cstdlib>
#include <optional>

#include "loa/shared_control.hpp"
#include "loa/util.hpp"

namespace loa::property {

struct ArbitrationTally {
  int steps = 0;
  int events = 0;
  int human_events = 0;
  int autonomy_events = 0;
  int non_adjacent = 0;         // |to - from| != 1
  int overridden_human = 0;     // autonomy acted on a tick with a human request
  int ignored_human = 0;        // feasible human request produced no matching event
  int emitted_in_band = 0;      // autonomy request while d_min in [delta_low, delta_high]
  int level_mismatch = 0;       // event endpoints disagree with the tracked level
};

// Random walk of d_min that keeps crossing the hysteresis band, with sparse
// human requests in both directions.
inline ArbitrationTally run_arbitration(std::uint64_t seed, int steps, const SafetyShiftParams& p = {},
                                        double dt = 0.05) {
  Rng rng(seed);
  ArbitrationTally tally;
  LoaState state;
  state.level = static_cast<LoaLevel>(rng.below(3));
  double d = rng.uniform(0.2, 2.0);
  for (int i = 0; i < steps; ++i) {
    ++tally.steps;
    if (rng.uniform() < 0.01) {
      d = rng.uniform(0.2, 2.0);
    } else {
      d = std::clamp(d + 0.05 * rng.normal(), 0.1, 3.0);
    }
    if (rng.uniform() < 0.05) d = rng.uniform(p.delta_low, p.delta_high);

    std::optional<ShiftDirection> human;
    const double u = rng.uniform();
    if (u < 0.02) human = ShiftDirection::Up;
    else if (u < 0.04) human = ShiftDirection::Down;

    auto [next_state, autonomy] = safety_shift_monitor(state, d, dt, p);
    if (autonomy && d >= p.delta_low && d <= p.delta_high) ++tally.emitted_in_band;

    const LoaLevel before = next_state.level;
    const auto arb = arbitrate_and_shift(before, human, autonomy, dt * i);
    if (arb.event) {
      ++tally.events;
      const auto& e = *arb.event;
      if (e.source == ShiftSource::Human) ++tally.human_events;
      else ++tally.autonomy_events;
      if (std::abs(index(e.to_level) - index(e.from_level)) != 1) ++tally.non_adjacent;
      if (e.from_level != before || e.to_level != arb.level) ++tally.level_mismatch;
      if (human && e.source == ShiftSource::Autonomy) ++tally.overridden_human;
    }
    if (human && shifted(before, *human)) {
      if (!arb.event || arb.event->source != ShiftSource::Human || arb.event->direction != *human) {
        ++tally.ignored_human;
      }
    }
    if (!arb.event && arb.level != before) ++tally.level_mismatch;
    state = next_state;
    state.level = arb.level;
  }
  return tally;
}

inline bool clean(const ArbitrationTally& t) {
  return t.non_adjacent == 0 && t.overridden_human == 0 && t.ignored_human == 0 && t.emitted_in_band == 0 &&
         t.level_mismatch == 0;
}

}  // namespace loa::property

#endif  // LOA_TESTS_PROPERTIES_HPP_
