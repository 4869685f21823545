#pragma once

#include <string>
#include <vector>

#include "hlsgen/codegen.hpp"
#include "hlsgen/hwlib.hpp"

namespace hlsgen {

// Structural checks over the generated design netlists (the top module and
// the if/else block modules):
//   - instantiated modules exist (catalog, generated, or library) and every
//     port of the instantiated module is connected exactly once,
//   - every net has exactly one driver,
//   - every net that is read is declared and driven,
//   - every output port is driven.
// Returns human-readable findings; an empty vector means the netlist is
// structurally sound.  The generated function library and testbench are
// fixed text and are not linted here.
std::vector<std::string> lint_design(const std::vector<GeneratedFile>& design_files,
                                     const hwlib::Library* library = nullptr);

} // namespace hlsgen
