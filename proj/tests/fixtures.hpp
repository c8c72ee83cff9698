#pragma once

#include "satrisk/model_io.hpp"

// Canonical two fixtures used across the suite, plus frozen expected values.
// The rationals come from solving the two discounted linear systems exactly;
// the test cases re-derive them with the independent oracles in oracle.hpp
// before trusting the implementation.

namespace fixtures {

inline constexpr const char* kRef1 = R"json({
  "gamma": 0.5,
  "states": ["s"],
  "actions": { "s": ["a"] },
  "transitions": [
    { "from": "s", "action": "a", "to": "s", "prob": 1.0 }
  ],
  "rewards": [
    { "from": "s", "action": "a", "to": "s", "value": 1.0, "prob": 0.5 },
    { "from": "s", "action": "a", "to": "s", "value": -1.0, "prob": 0.5 }
  ],
  "initial": { "s": 1.0 },
  "policy": { "s": { "a": 1.0 } }
})json";

inline constexpr const char* kRef2 = R"json({
  "gamma": 0.9,
  "states": ["s1", "s2"],
  "actions": { "s1": ["a", "b"], "s2": ["a"] },
  "transitions": [
    { "from": "s1", "action": "a", "to": "s1", "prob": 0.6 },
    { "from": "s1", "action": "a", "to": "s2", "prob": 0.4 },
    { "from": "s1", "action": "b", "to": "s2", "prob": 1.0 },
    { "from": "s2", "action": "a", "to": "s1", "prob": 0.7 },
    { "from": "s2", "action": "a", "to": "s2", "prob": 0.3 }
  ],
  "rewards": [
    { "from": "s1", "action": "a", "to": "s1", "value": 1.0, "prob": 1.0 },
    { "from": "s1", "action": "a", "to": "s2", "value": 5.0, "prob": 0.5 },
    { "from": "s1", "action": "a", "to": "s2", "value": -1.0, "prob": 0.5 },
    { "from": "s1", "action": "b", "to": "s2", "value": 0.0, "prob": 1.0 },
    { "from": "s2", "action": "a", "to": "s1", "value": 2.0, "prob": 1.0 },
    { "from": "s2", "action": "a", "to": "s2", "value": -1.0, "prob": 1.0 }
  ],
  "initial": { "s1": 1.0 },
  "policy": { "s1": { "a": 0.5, "b": 0.5 }, "s2": { "a": 1.0 } }
})json";

inline satrisk::ParsedModel ref1() { return satrisk::parse_model(kRef1); }
inline satrisk::ParsedModel ref2() { return satrisk::parse_model(kRef2); }

// Return moments of the two fixtures.
inline constexpr double kRef1Variance = 4.0 / 3.0;
inline constexpr double kRef2Mean = 301.0 / 34.0;
inline constexpr double kRef2SatVariance = 4092091.0 / 382636.0;
inline constexpr double kRef2SimplifiedVariance = 1701.0 / 21964.0;

// Conditional expected rewards of the simplified ref2 baseline.
inline constexpr double kRef2SimplifiedRewardS1 = 0.7;
inline constexpr double kRef2SimplifiedRewardS2 = 1.1;

// Determinism regression: ref2 original process, horizon 200, stream (42,0,0).
inline constexpr double kRef2PinnedSample = 8.5097330605125503;

} // namespace fixtures
