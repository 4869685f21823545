#pragma once

#include <string>
#include <vector>

#include "hlsgen/tree.hpp"

namespace hlsgen {

// One pipeline balancing register chain on a producer->consumer edge whose
// level gap exceeds the producer's latency.  Condition bits travel on
// 1-bit chains, data on 32-bit chains.
struct DelayElement {
    int src_node = -1;         // producing node address, -1 for a primary input
    std::string src_input;     // input port name when src_node == -1
    int sink_node = -1;
    int sink_operand = -1;     // operand index on the sink
    int pair_half = -1;        // 0 = if producer, 1 = else producer, -1 = single
    int stages = 0;
    int width = 32;
};

struct Schedule {
    std::vector<int> start;  // per node address; first active cycle (level)
    std::vector<int> finish; // last active cycle
    std::vector<DelayElement> delays;
    int total_cycles = 0;    // finish of the slowest output producer
};

// As-soon-as-possible levels: a node starts one cycle after its slowest
// producer finishes; primary inputs and constants finish at cycle 0.
// Every name-carrying edge with a gap gets a delay chain; constants are
// wired literals and never need one.
Schedule schedule_asap(const TreeArray& tree);

// Line-oriented dump: `addr | level | finish` per node, then one line per
// delay chain, then the total.
std::string dump_schedule(const TreeArray& tree, const Schedule& sched);

} // namespace hlsgen
