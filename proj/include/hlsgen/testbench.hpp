#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hlsgen/schedule.hpp"
#include "hlsgen/simulate.hpp"
#include "hlsgen/tree.hpp"

namespace hlsgen {

// Deterministic 64-bit stream for stimulus generation.
struct SplitMix64 {
    uint64_t state = 0;
    explicit SplitMix64(uint64_t seed) : state(seed) {}
    uint64_t next() {
        uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
};

// Uniform raw value in [lo_raw, hi_raw]; the tool-wide stimulus
// distribution, shared by the testbench and the `simulate` command so the
// same seed produces the same vectors everywhere.
inline fx::FixedValue draw_fixed(SplitMix64& rng, int32_t lo_raw, int32_t hi_raw) {
    uint64_t span = static_cast<uint64_t>(static_cast<int64_t>(hi_raw) - static_cast<int64_t>(lo_raw)) + 1;
    return fx::FixedValue{static_cast<int32_t>(static_cast<int64_t>(lo_raw) +
                                               static_cast<int64_t>(rng.next() % span))};
}

struct TestbenchOptions {
    uint64_t seed = 1;
    int vectors = 10;
    int32_t range_lo_raw = -8 * 65536; // inclusive raw stimulus range
    int32_t range_hi_raw = 8 * 65536;
    bool with_asserts = true; // golden expectations + per-vector checks
    bool pipelined = false;
    // Explicit stimulus (one map per vector, all inputs present); when
    // non-empty it replaces the random stream.
    std::vector<std::map<std::string, fx::FixedValue>> stimulus;
};

struct TestbenchResult {
    std::string verilog;  // tb_top.v content
    bool stimulus_only = false; // no expectations (library calls present)
    std::vector<std::map<std::string, fx::FixedValue>> stimulus;
    std::vector<std::map<std::string, fx::FixedValue>> expected;
    std::vector<std::string> warnings;
};

// Self-checking testbench: drives `vectors` input sets, waits for the
// design to settle (unrolled: input hold over total_cycles+1 edges;
// pipelined: start pulse, then one edge past `valid`), and compares each
// output against the golden evaluation.  Outputs on an exact-arithmetic
// cone must match bit for bit; outputs depending on sine or logarithm
// approximations carry a 256-LSB (2^-8) tolerance.  Throws fx::EvalError
// when a stimulus vector hits a domain fault, so callers can suggest
// --range or --no-assert.
TestbenchResult generate_testbench(const TreeArray& tree, const Schedule& sched,
                                   const TestbenchOptions& opt);

// Parses a stimulus file: one vector per line, whitespace-separated values
// in input-port order, each `0x` raw hex or a decimal real; '#' comments.
std::vector<std::map<std::string, fx::FixedValue>>
parse_stimulus_file(const TreeArray& tree, const std::string& path);

} // namespace hlsgen
