#pragma once

#include "chainless/fsm.hpp"

namespace chainless {

/// Minimal FSM used by tests and scenarios: a u64 counter. Inputs are ASCII
/// "+N" / "-N"; decrements below zero are rejected. State encodes as a
/// big-endian u64.
class CounterApp : public App {
public:
    std::string kind() const override { return "counter"; }
    ApplyOutcome apply(const Bytes& state, const Bytes& input) const override;

    static Bytes encode_state(uint64_t value);
    static uint64_t decode_state(const Bytes& state);
};

}  // namespace chainless
