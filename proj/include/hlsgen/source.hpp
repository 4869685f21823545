#pragma once

#include <memory>
#include <string>
#include <vector>

namespace hlsgen {

// Arithmetic expression usable where the dialect requires an
// elaboration-time constant: loop bounds, array indices, number_to_hex
// arguments.  Loop variables are the only names allowed.
struct ConstExpr {
    enum class Op { Num, Var, Pi, Add, Sub, Mul, Div, Neg };
    Op op = Op::Num;
    long double num = 0.0L;
    bool is_integer = false; // literal was written without '.' or exponent
    std::string var;
    std::shared_ptr<ConstExpr> lhs, rhs;
};
using ConstExprPtr = std::shared_ptr<ConstExpr>;

// One argument of a source call.
struct ArgExpr {
    enum class Kind {
        StrRef,   // "name" or "name[expr]"
        Number,   // bare numeric literal (legal only in specific slots)
        NumToHex, // number_to_hex(expr)
        NameList, // ["a", "b"] (pipelined If_V declaration lists)
    };
    Kind kind = Kind::StrRef;

    std::string base;   // StrRef: name before the optional index
    ConstExprPtr index; // StrRef: nullptr for scalars
    ConstExprPtr expr;  // Number (wrapped literal) and NumToHex
    std::string literal_text;        // Number: original spelling
    std::vector<std::string> names;  // NameList
    int line = 0;
    int col = 0;
};

// Unexpanded statement as parsed; loops and blocks keep their bodies nested.
struct RawStmt {
    enum class Kind { Call, For, IfElse };
    Kind kind = Kind::Call;
    int line = 0;

    // Call
    std::string call_name;
    std::vector<ArgExpr> args;

    // For
    std::string loop_var;
    ConstExprPtr range_lo; // nullptr means range(hi) starting at 0
    ConstExprPtr range_hi;
    std::vector<RawStmt> body;

    // IfElse
    ArgExpr cmp_lhs, cmp_rhs;
    std::string cmp_token;
    bool has_io_decl = false;            // five-argument pipelined form
    std::vector<std::string> decl_inputs;  // declarative only
    std::vector<std::string> decl_outputs;
    std::vector<RawStmt> if_body;
    std::vector<RawStmt> else_body;
};

// Scalar ports have array_len 0; "A[16]" declares array_len 16 and elaborates
// to ports array_A_wire_0 .. array_A_wire_15.
struct PortDecl {
    std::string name;
    int array_len = 0;
    int line = 0;
};

struct SourceProgram {
    std::string name; // design/module name (file stem)
    std::vector<PortDecl> inputs;
    std::vector<PortDecl> outputs;
    std::vector<RawStmt> body;

    std::vector<std::string> input_ports() const;  // arrays expanded, declared order
    std::vector<std::string> output_ports() const;
};

// Elaborated name of one array element.
std::string array_element_name(const std::string& base, long index);

// Parses the call-statement dialect.  Indentation is 4 spaces per level,
// comments start with '#'.  Throws CompileError (SYNTAX, PORT_LIMIT, NESTING,
// DUPLICATE_PORT) on malformed input.
SourceProgram parse_source(const std::string& text, const std::string& design_name);

} // namespace hlsgen
