#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hlsgen {

// Diagnostic codes reported by the compiler pipeline.  Every user-facing
// error carries one of these so scripts can match on a stable identifier.
namespace diag {
inline constexpr const char* SYNTAX = "VP001";           // malformed source line
inline constexpr const char* PORT_LIMIT = "VP002";       // more than 20 input or output names
inline constexpr const char* NESTING = "VP003";          // if/else nested deeper than 2 levels
inline constexpr const char* NONCONST_BOUND = "VP004";   // loop bound not an elaboration constant
inline constexpr const char* UNDEFINED_NAME = "VP005";   // operand never produced
inline constexpr const char* SELF_REFERENCE = "VP006";   // result name repeats an operand name
inline constexpr const char* BARE_LITERAL = "VP007";     // numeric literal outside number_to_hex
inline constexpr const char* UNKNOWN_FUNCTION = "VP008"; // call to a name not in the catalog
inline constexpr const char* WRITE_TO_INPUT = "VP009";   // statement assigns an input port
inline constexpr const char* CONST_RANGE = "VP010";      // constant outside Q16.16 range
inline constexpr const char* UNKNOWN_LABEL = "VP011";    // Call_V label missing from library
inline constexpr const char* CALL_ARITY = "VP012";       // Call_V operand count mismatch
inline constexpr const char* POWER_EXPONENT = "VP013";   // exponent not an integer in [-128,127]
inline constexpr const char* UNASSIGNED_OUTPUT = "VP014"; // declared output never produced
inline constexpr const char* DUPLICATE_PORT = "VP015";   // port name declared twice
} // namespace diag

struct Diagnostic {
    std::string code;
    std::string message;
    int line = 0;
    int col = 0;

    std::string str() const {
        std::string s = "error[" + code + "]";
        if (line > 0) {
            s += " line " + std::to_string(line);
            if (col > 0)
                s += ":" + std::to_string(col);
        }
        s += ": " + message;
        return s;
    }
};

// Thrown for source-level problems (parse, elaboration, range).  The driver
// maps these to exit code 2.
class CompileError : public std::runtime_error {
  public:
    explicit CompileError(Diagnostic d) : std::runtime_error(d.str()), diag_(std::move(d)) {}
    const Diagnostic& diagnostic() const { return diag_; }

  private:
    Diagnostic diag_;
};

// Thrown when an internal invariant breaks.  The driver maps these to exit
// code 3; seeing one is always a bug in this tool, never in user input.
class InternalError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

} // namespace hlsgen
