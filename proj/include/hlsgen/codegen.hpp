#pragma once

#include <string>
#include <vector>

#include "hlsgen/hwlib.hpp"
#include "hlsgen/schedule.hpp"
#include "hlsgen/tree.hpp"

namespace hlsgen {

struct GeneratedFile {
    std::string name; // relative to the output directory
    std::string content;
};

struct CodegenOptions {
    bool pipelined = false;
    const hwlib::Library* library = nullptr;
};

// Emits the design: `top.v` with the design module, plus one
// `ifelse_<k>.v` per if/else block.  Every block becomes its own module
// containing its comparison and both branch datapaths; the parent scope
// instantiates it and reconciles the `<name>_if_r` / `<name>_else_r`
// outputs with Merge_V instances selected by `cond_r`.
//
// Unrolled designs hold one transaction with stable inputs, so producer
// registers simply settle level by level and no balancing is needed.
// Pipelined designs add a start/busy/valid wrapper and one Delay_V chain
// per level-gapped edge so every operand arrives exactly when its consumer
// samples.
std::vector<GeneratedFile> emit_design(const TreeArray& tree, const Schedule& sched,
                                       const CodegenOptions& opt);

// The fixed hardware function catalog shipped with every build, one file
// per module (Addition_V.v ... Delay_V.v), placed under lib/.
std::vector<GeneratedFile> function_library_files();

// Short instance prefix for an operator ("add", "mul", ...), used for
// u_<prefix>_<address> instance names.
std::string op_instance_prefix(OpKind k);

} // namespace hlsgen
