#include "hlsgen/statement.hpp"

#include "hlsgen/diagnostics.hpp"

namespace hlsgen {

const char* op_name(OpKind k) {
    switch (k) {
    case OpKind::Add: return "Add";
    case OpKind::Sub: return "Sub";
    case OpKind::Mul: return "Mul";
    case OpKind::Div: return "Div";
    case OpKind::Power: return "Power";
    case OpKind::Log: return "Log";
    case OpKind::Sqrt: return "Sqrt";
    case OpKind::SinCosTan: return "SinCosTan";
    case OpKind::Value: return "Value";
    case OpKind::IfCompare: return "IfCompare";
    case OpKind::Merge: return "Merge";
    case OpKind::Call: return "Call";
    case OpKind::Unknown: return "Unknown";
    }
    return "?";
}

const char* op_call_name(OpKind k) {
    switch (k) {
    case OpKind::Add: return "Addition_V";
    case OpKind::Sub: return "Subtraction_V";
    case OpKind::Mul: return "Multiplication_V";
    case OpKind::Div: return "Division_V";
    case OpKind::Power: return "Power_V";
    case OpKind::Log: return "Logarithm_V";
    case OpKind::Sqrt: return "Sqrt_V";
    case OpKind::SinCosTan: return "SinCosTan_V";
    case OpKind::Value: return "Value_V";
    case OpKind::IfCompare: return "If_V";
    case OpKind::Merge: return "Merge_V";
    case OpKind::Call: return "Call_V";
    case OpKind::Unknown: return "?";
    }
    return "?";
}

const char* op_cost_key(OpKind k) {
    switch (k) {
    case OpKind::Add: return "add";
    case OpKind::Sub: return "sub";
    case OpKind::Mul: return "mul";
    case OpKind::Div: return "div";
    case OpKind::Power: return "power";
    case OpKind::Log: return "log";
    case OpKind::Sqrt: return "sqrt";
    case OpKind::SinCosTan: return "sincostan";
    case OpKind::Value: return "value";
    case OpKind::IfCompare: return "compare";
    case OpKind::Merge: return "merge";
    case OpKind::Call: return "call";
    case OpKind::Unknown: return "unknown";
    }
    return "?";
}

std::optional<OpArity> op_arity(OpKind k) {
    switch (k) {
    case OpKind::Add:
    case OpKind::Sub:
    case OpKind::Mul:
    case OpKind::Div:
    case OpKind::Log: return OpArity{1, 2};
    case OpKind::Power: return OpArity{1, 2}; // operand 2 is the integer exponent
    case OpKind::Sqrt:
    case OpKind::Value: return OpArity{1, 1};
    case OpKind::SinCosTan: return OpArity{3, 1};
    case OpKind::IfCompare: return OpArity{1, 2};
    case OpKind::Merge: return OpArity{1, 2}; // merged value (pair) + condition
    default: return std::nullopt;
    }
}

OpKind op_from_call_name(const std::string& name) {
    for (OpKind k : {OpKind::Add, OpKind::Sub, OpKind::Mul, OpKind::Div, OpKind::Power, OpKind::Log,
                     OpKind::Sqrt, OpKind::SinCosTan, OpKind::Value, OpKind::IfCompare, OpKind::Call}) {
        if (name == op_call_name(k))
            return k;
    }
    return OpKind::Unknown;
}

static std::string operand_text(const Statement& s, size_t idx) {
    const OperandRef& o = s.operands[idx];
    switch (o.kind) {
    case OperandRef::Kind::Name: return "\"" + o.name + "\"";
    case OperandRef::Kind::Constant:
        // the power exponent prints as the plain integer it is
        if (s.op == OpKind::Power && idx == 1)
            return std::to_string(o.value.raw >> 16);
        return fx::to_hex(o.value);
    case OperandRef::Kind::BareLiteral: return o.literal;
    }
    return "?";
}

std::string statement_text(const Statement& s) {
    std::string t;
    switch (s.op) {
    case OpKind::IfCompare:
        t = "If_V(";
        t += operand_text(s, 0) + ", " + operand_text(s, 1);
        t += ", \"" + std::string(fx::cmp_token(s.cmp)) + "\")";
        return t;
    case OpKind::Merge:
        t = "Merge_V(\"" + s.results.at(0) + "\", block " + std::to_string(s.merge_block) + ")";
        return t;
    case OpKind::Call:
        t = "Call_V(\"" + s.call_label + "\"";
        break;
    case OpKind::Unknown:
        t = s.unknown_name + "(";
        for (size_t i = 0; i < s.operands.size(); ++i) {
            if (i)
                t += ", ";
            t += operand_text(s, i);
        }
        t += ")";
        return t;
    default:
        t = std::string(op_call_name(s.op)) + "(";
        break;
    }
    bool first = s.op != OpKind::Call;
    for (const std::string& r : s.results) {
        if (!first)
            t += ", ";
        first = false;
        t += "\"" + r + "\"";
    }
    for (size_t i = 0; i < s.operands.size(); ++i) {
        if (!first)
            t += ", ";
        first = false;
        t += operand_text(s, i);
    }
    t += ")";
    return t;
}

} // namespace hlsgen
