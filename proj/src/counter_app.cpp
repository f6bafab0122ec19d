#include "chainless/counter_app.hpp"

#include <charconv>

namespace chainless {

Bytes CounterApp::encode_state(uint64_t value) {
    ByteWriter w;
    w.u64(value);
    return w.take();
}

uint64_t CounterApp::decode_state(const Bytes& state) {
    ByteReader r(state);
    return r.u64();
}

ApplyOutcome CounterApp::apply(const Bytes& state, const Bytes& input) const {
    if (state.size() != 8) return ApplyOutcome::reject("malformed counter state");
    if (input.empty() || (input[0] != '+' && input[0] != '-'))
        return ApplyOutcome::reject("counter input must be +N or -N");
    uint64_t delta = 0;
    const char* first = reinterpret_cast<const char*>(input.data()) + 1;
    const char* last = reinterpret_cast<const char*>(input.data()) + input.size();
    auto [p, ec] = std::from_chars(first, last, delta);
    if (ec != std::errc() || p != last) return ApplyOutcome::reject("counter input must be +N or -N");

    uint64_t value = decode_state(state);
    if (input[0] == '+') {
        if (value + delta < value) return ApplyOutcome::reject("counter overflow");
        value += delta;
    } else {
        if (delta > value) return ApplyOutcome::reject("counter underflow");
        value -= delta;
    }
    return ApplyOutcome::ok(encode_state(value));
}

}  // namespace chainless
