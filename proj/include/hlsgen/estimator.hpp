#pragma once

#include <map>
#include <string>
#include <vector>

#include "hlsgen/hwlib.hpp"
#include "hlsgen/schedule.hpp"
#include "hlsgen/tree.hpp"

namespace hlsgen {

// Per-instance resource figures for each catalog operator.  The numbers are
// calibration constants for a mid-range FPGA target and can be replaced
// wholesale from a cost file (`mul.lut=240` one per line).
struct CostTable {
    std::map<std::string, hwlib::Resources> ops; // keyed by op_cost_key()

    static CostTable defaults();
    hwlib::Resources get(OpKind k) const;
};

// Applies one `key.field=value` override, e.g. "mul.lut=238".
// Throws std::invalid_argument on malformed keys.
void apply_cost_override(CostTable& table, const std::string& kv);

// Reads a cost file: one override per line, blank lines and '#' comments
// ignored.
void load_cost_file(CostTable& table, const std::string& path);

struct EstimateLine {
    std::string label; // operator name, call label, "delay" or "wrapper"
    int count = 0;     // instances; for "delay": total register stages
    hwlib::Resources res;
};

struct Estimate {
    std::vector<EstimateLine> lines;
    hwlib::Resources total;
};

// Sums per-node costs; library calls use the resources recorded at
// registration.  Unrolled designs have no balancing registers, so delay
// chains are counted only when `pipelined` is set, as is the start/valid
// wrapper (one counter's worth of FF and LUT).
Estimate estimate(const TreeArray& tree, const Schedule& sched,
                  const CostTable& costs, bool pipelined);

// Human-readable build report: design, mode, node and cycle counts,
// then one table row per estimate line.  Deterministic byte-for-byte.
std::string emit_report(const TreeArray& tree, const Schedule& sched,
                        const Estimate& est, bool pipelined);

} // namespace hlsgen
