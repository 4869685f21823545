#pragma once

#include <string>
#include <vector>

#include "hlsgen/diagnostics.hpp"
#include "hlsgen/hwlib.hpp"
#include "hlsgen/source.hpp"
#include "hlsgen/statement.hpp"

namespace hlsgen {

struct ElabOptions {
    bool fold_constants = true;
    const hwlib::Library* library = nullptr;
};

struct ElabResult {
    std::vector<Statement> stmts;
    std::vector<std::string> warnings; // e.g. fold-time division by zero
    int folded_count = 0;
    int block_count = 0;
};

// Unrolls loops, flattens array references, resolves number_to_hex constants
// and folds statements whose operands are all constants (unless the result is
// a declared output or the statement sits inside an if/else block).  Throws
// CompileError for undefined names, non-constant bounds and constants outside
// the representable range.
ElabResult elaborate(const SourceProgram& prog, const ElabOptions& opts = {});

// Structure rules, checked on the elaborated statements.  Returns the full
// set of violations (empty when the program is clean):
//   - numeric literal outside number_to_hex          (BARE_LITERAL)
//   - call to a name outside the function catalog    (UNKNOWN_FUNCTION)
//   - result name repeating an operand or result     (SELF_REFERENCE)
//   - statement assigning an input port              (WRITE_TO_INPUT)
//   - Call_V label missing from the library          (UNKNOWN_LABEL)
//   - declared output never produced                 (UNASSIGNED_OUTPUT)
std::vector<Diagnostic> validate_rules(const SourceProgram& prog, const std::vector<Statement>& stmts,
                                       const hwlib::Library* library);

// Name of the generated condition wire for if/else block `block_id`.  The
// leading underscore keeps it out of the user namespace.
std::string cond_wire_name(int block_id);

} // namespace hlsgen
