#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>

#include "hlsgen/schedule.hpp"
#include "hlsgen/tree.hpp"

namespace hlsgen {

// Raised when a design contains nodes the built-in evaluator has no model
// for (external library calls).  The testbench generator falls back to
// stimulus-only vectors in that case.
struct SimUnsupported : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SimResult {
    std::map<std::string, fx::FixedValue> outputs;
    fx::EvalWarnings warnings;
};

// Functional evaluation in node-address order.  Both branches of every
// if/else block are computed (exactly as the hardware does) and each Merge
// selects by its condition bit, so a fault in a not-taken branch still
// faults.  Throws fx::EvalError on domain faults and SimUnsupported on
// library calls.
SimResult simulate_graph(const TreeArray& tree,
                         const std::map<std::string, fx::FixedValue>& inputs);

// Cycle-accurate replay of a schedule: every node output is a register that
// becomes defined when the node finishes, and every delay chain shifts once
// per cycle.  Operands are read exactly when the consumer samples them; a
// read of a not-yet-defined register throws InternalError, so any
// misaligned delay insertion surfaces as a failure instead of a wrong
// value.  The result must match simulate_graph bit for bit.
SimResult simulate_scheduled(const TreeArray& tree, const Schedule& sched,
                             const std::map<std::string, fx::FixedValue>& inputs);

// Output ports whose value depends on an approximated operator (sine table
// or logarithm), and therefore carry a small tolerance in the generated
// testbench instead of an exact match.
std::set<std::string> approx_outputs(const TreeArray& tree);

} // namespace hlsgen
