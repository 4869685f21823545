#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hlsgen/fixedpoint.hpp"

namespace hlsgen {

enum class OpKind {
    Add,
    Sub,
    Mul,
    Div,
    Power,
    Log,
    Sqrt,
    SinCosTan,
    Value,
    IfCompare,
    Merge,
    Call,    // instance of a registered library module
    Unknown, // unrecognized call name, kept so validation can report it
};

const char* op_name(OpKind k);       // "Add", "Mul", ...
const char* op_call_name(OpKind k);  // "Addition_V", "Multiplication_V", ...
const char* op_cost_key(OpKind k);   // "add", "mul", ... (cost-table key)

// Operands are either references to produced names / input ports, or
// elaboration-time constants.  BareLiteral survives parsing only so that
// rule validation can point at it; it never reaches the tree.
struct OperandRef {
    enum class Kind { Name, Constant, BareLiteral };
    Kind kind = Kind::Name;
    std::string name;        // Kind::Name
    fx::FixedValue value{};  // Kind::Constant
    std::string literal;     // Kind::BareLiteral (original spelling)

    static OperandRef make_name(std::string n) {
        OperandRef r;
        r.kind = Kind::Name;
        r.name = std::move(n);
        return r;
    }
    static OperandRef make_const(fx::FixedValue v) {
        OperandRef r;
        r.kind = Kind::Constant;
        r.value = v;
        return r;
    }
    static OperandRef make_bare(std::string text) {
        OperandRef r;
        r.kind = Kind::BareLiteral;
        r.literal = std::move(text);
        return r;
    }
};

enum class Branch { If, Else };

// One enclosing if/else level: which block and which side of it.
struct BlockFrame {
    int block_id = -1;
    Branch branch = Branch::If;

    friend bool operator==(const BlockFrame& a, const BlockFrame& b) {
        return a.block_id == b.block_id && a.branch == b.branch;
    }
};

enum class StmtOrigin {
    Source,  // came from a source statement
    Padding, // synthesized `name = 0` in the deficient branch
    MergeSynth, // synthesized two-to-one select after a block
};

// A fully elaborated statement: loops unrolled, arrays flattened, constants
// folded.  This is the unit the tree builder consumes one-to-one.
struct Statement {
    OpKind op = OpKind::Unknown;
    std::vector<std::string> results;
    std::vector<OperandRef> operands;

    fx::Cmp cmp = fx::Cmp::Gt; // IfCompare only
    int cond_block = -1;       // IfCompare: the block this condition opens
    int merge_block = -1;      // Merge: the block being reconciled
    std::string call_label;    // Call only
    std::string unknown_name;  // Unknown only: the call name as written

    std::vector<BlockFrame> blocks; // enclosing if/else context, outermost first
    StmtOrigin origin = StmtOrigin::Source;
    int line = 0;
    std::string text; // canonical rendering, also used for emitted comments
};

// Canonical, whitespace-stable rendering of a statement.
std::string statement_text(const Statement& s);

// Arity of the catalog functions (results, operands); nullopt for
// Call/Unknown whose shape comes from elsewhere.
struct OpArity {
    int results = 0;
    int operands = 0;
};
std::optional<OpArity> op_arity(OpKind k);

// Maps a source call name like "Addition_V" to its kind; Unknown if absent.
OpKind op_from_call_name(const std::string& name);

} // namespace hlsgen
