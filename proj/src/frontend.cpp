#include "hlsgen/frontend.hpp"

#include <cmath>
#include <map>
#include <set>

namespace hlsgen {

std::string cond_wire_name(int block_id) { return "_cond_" + std::to_string(block_id); }

namespace {

[[noreturn]] void fail(const char* code, const std::string& msg, int line) {
    throw CompileError(Diagnostic{code, msg, line, 0});
}

constexpr long STMT_CAP = 1000000;
constexpr long LOOP_CAP = 65536;

struct Elaborator {
    const SourceProgram& prog;
    const ElabOptions& opts;

    std::vector<Statement> out;
    std::vector<std::string> warnings;
    int folded = 0;
    int next_block = 0;

    std::vector<std::pair<std::string, long double>> loop_vars;
    std::map<std::string, fx::FixedValue> const_env; // names folded to constants
    std::set<std::string> global_defined;
    std::vector<BlockFrame> frames;
    std::vector<std::set<std::string>> frame_defined;
    std::set<std::string> input_set, output_set;

    explicit Elaborator(const SourceProgram& p, const ElabOptions& o) : prog(p), opts(o) {
        for (const std::string& n : p.input_ports())
            input_set.insert(n);
        for (const std::string& n : p.output_ports())
            output_set.insert(n);
    }

    // ---- constant expressions ------------------------------------------

    long double eval_const(const ConstExpr& e, int line) {
        switch (e.op) {
        case ConstExpr::Op::Num: return e.num;
        case ConstExpr::Op::Pi: return 3.14159265358979323846264338327950288L;
        case ConstExpr::Op::Var: {
            for (auto it = loop_vars.rbegin(); it != loop_vars.rend(); ++it)
                if (it->first == e.var)
                    return it->second;
            fail(diag::NONCONST_BOUND,
                 "'" + e.var + "' is not a loop variable; only constants are allowed here", line);
        }
        case ConstExpr::Op::Add: return eval_const(*e.lhs, line) + eval_const(*e.rhs, line);
        case ConstExpr::Op::Sub: return eval_const(*e.lhs, line) - eval_const(*e.rhs, line);
        case ConstExpr::Op::Mul: return eval_const(*e.lhs, line) * eval_const(*e.rhs, line);
        case ConstExpr::Op::Div: {
            long double d = eval_const(*e.rhs, line);
            if (d == 0.0L)
                fail(diag::CONST_RANGE, "division by zero in constant expression", line);
            return eval_const(*e.lhs, line) / d;
        }
        case ConstExpr::Op::Neg: return -eval_const(*e.lhs, line);
        }
        throw InternalError("unhandled constant expression");
    }

    long eval_int_const(const ConstExpr& e, int line, const char* what) {
        long double v = eval_const(e, line);
        long double r = roundl(v);
        if (fabsl(v - r) > 1e-9L || fabsl(r) > 1e9L)
            fail(diag::CONST_RANGE, std::string(what) + " must be an integer constant", line);
        return static_cast<long>(r);
    }

    // ---- names -----------------------------------------------------------

    std::string resolve_ref(const ArgExpr& a, int line) {
        if (!a.index)
            return a.base;
        long idx = eval_int_const(*a.index, line, "array index");
        if (idx < 0)
            fail(diag::CONST_RANGE, "array index must be non-negative, got " + std::to_string(idx),
                 line);
        return array_element_name(a.base, idx);
    }

    bool is_defined(const std::string& name) const {
        if (input_set.count(name) || const_env.count(name) || global_defined.count(name))
            return true;
        for (const auto& fd : frame_defined)
            if (fd.count(name))
                return true;
        return false;
    }

    void define(const std::string& name) {
        if (frame_defined.empty())
            global_defined.insert(name);
        else
            frame_defined.back().insert(name);
    }

    // ---- operand resolution ----------------------------------------------

    OperandRef resolve_operand(const ArgExpr& a, int line) {
        switch (a.kind) {
        case ArgExpr::Kind::StrRef: {
            std::string name = resolve_ref(a, line);
            auto it = const_env.find(name);
            if (it != const_env.end())
                return OperandRef::make_const(it->second);
            if (!is_defined(name))
                fail(diag::UNDEFINED_NAME, "'" + name + "' is used before it is produced", line);
            return OperandRef::make_name(name);
        }
        case ArgExpr::Kind::NumToHex: {
            long double v = eval_const(*a.expr, line);
            try {
                return OperandRef::make_const(fx::to_fixed(v));
            } catch (const fx::EvalError& e) {
                fail(diag::CONST_RANGE, e.message(), line);
            }
        }
        case ArgExpr::Kind::Number:
            return OperandRef::make_bare(a.literal_text);
        case ArgExpr::Kind::NameList:
            fail(diag::SYNTAX, "a name list is not valid in this position", line);
        }
        throw InternalError("unhandled argument kind");
    }

    std::string result_name(const ArgExpr& a, int line) {
        if (a.kind != ArgExpr::Kind::StrRef || a.base.empty() ||
            !std::isalpha(static_cast<unsigned char>(a.base[0])))
            fail(diag::SYNTAX, "result position requires a quoted signal name", line);
        return resolve_ref(a, line);
    }

    // ---- folding -----------------------------------------------------------

    fx::FixedValue quantize_guarded(long double v) {
        if (!std::isfinite(static_cast<double>(v))) {
            warnings.push_back("constant fold overflowed; result saturated");
            return fx::FixedValue{v > 0 ? INT32_MAX : (v < 0 ? INT32_MIN : 0)};
        }
        return fx::quantize_wrap(v);
    }

    bool try_fold(Statement& st, int line) {
        if (!opts.fold_constants || !frames.empty())
            return false;
        switch (st.op) {
        case OpKind::Add:
        case OpKind::Sub:
        case OpKind::Mul:
        case OpKind::Div:
        case OpKind::Power:
        case OpKind::Log:
        case OpKind::Sqrt:
        case OpKind::SinCosTan:
        case OpKind::Value: break;
        default: return false;
        }
        for (const OperandRef& o : st.operands)
            if (o.kind != OperandRef::Kind::Constant)
                return false;
        for (const std::string& r : st.results)
            if (output_set.count(r))
                return false;

        auto arg = [&](size_t i) { return st.operands[i].value; };
        auto real = [&](size_t i) { return fx::to_real(st.operands[i].value); };
        std::vector<fx::FixedValue> vals;
        try {
            switch (st.op) {
            case OpKind::Add: vals = {quantize_guarded(real(0) + real(1))}; break;
            case OpKind::Sub: vals = {quantize_guarded(real(0) - real(1))}; break;
            case OpKind::Mul: vals = {quantize_guarded(real(0) * real(1))}; break;
            case OpKind::Div:
                if (arg(1).raw == 0) {
                    warnings.push_back("division by zero folded to saturation at line " +
                                       std::to_string(line));
                    vals = {fx::FixedValue{arg(0).raw < 0 ? INT32_MIN : INT32_MAX}};
                } else {
                    vals = {quantize_guarded(real(0) / real(1))};
                }
                break;
            case OpKind::Power:
                vals = {quantize_guarded(powl(real(0), static_cast<long double>(arg(1).raw >> 16)))};
                break;
            case OpKind::Log: vals = {fx::log(arg(0), arg(1))}; break;
            case OpKind::Sqrt: vals = {fx::sqrt(arg(0))}; break;
            case OpKind::SinCosTan: {
                fx::SinCosTan r = fx::sincostan(arg(0));
                vals = {r.sin_v, r.cos_v, r.tan_v};
                break;
            }
            case OpKind::Value: vals = {arg(0)}; break;
            default: return false;
            }
        } catch (const fx::EvalError& e) {
            fail(diag::CONST_RANGE, "constant evaluation failed: " + e.message(), line);
        }
        for (size_t i = 0; i < st.results.size(); ++i)
            const_env[st.results[i]] = vals[i];
        ++folded;
        return true;
    }

    // ---- statement emission -------------------------------------------------

    void emit(Statement st, int line) {
        st.line = line;
        st.blocks = frames;
        st.text = statement_text(st);
        if (static_cast<long>(out.size()) >= STMT_CAP)
            fail(diag::CONST_RANGE, "design exceeds the statement cap after unrolling", line);
        if (!try_fold(st, line)) {
            for (const std::string& r : st.results)
                define(r);
            out.push_back(std::move(st));
        }
    }

    void elaborate_call(const RawStmt& raw) {
        OpKind op = op_from_call_name(raw.call_name);

        if (op == OpKind::Call) {
            elaborate_lib_call(raw);
            return;
        }
        if (op == OpKind::Unknown) {
            Statement st;
            st.op = OpKind::Unknown;
            st.unknown_name = raw.call_name;
            // assume the catalog convention (first argument is the result) so
            // downstream statements still elaborate and validation can report
            // the unknown function instead of a cascade
            for (size_t i = 0; i < raw.args.size(); ++i) {
                const ArgExpr& a = raw.args[i];
                if (i == 0 && a.kind == ArgExpr::Kind::StrRef) {
                    st.results.push_back(result_name(a, raw.line));
                } else if (a.kind == ArgExpr::Kind::StrRef) {
                    std::string name = resolve_ref(a, raw.line);
                    auto it = const_env.find(name);
                    st.operands.push_back(it != const_env.end()
                                              ? OperandRef::make_const(it->second)
                                              : OperandRef::make_name(name));
                } else if (a.kind == ArgExpr::Kind::Number) {
                    st.operands.push_back(OperandRef::make_bare(a.literal_text));
                } else if (a.kind == ArgExpr::Kind::NumToHex) {
                    st.operands.push_back(resolve_operand(a, raw.line));
                }
            }
            emit(std::move(st), raw.line);
            return;
        }

        OpArity ar = *op_arity(op);
        if (static_cast<int>(raw.args.size()) != ar.results + ar.operands)
            fail(diag::SYNTAX,
                 raw.call_name + " takes " + std::to_string(ar.results + ar.operands) +
                     " arguments, got " + std::to_string(raw.args.size()),
                 raw.line);

        Statement st;
        st.op = op;
        for (int i = 0; i < ar.results; ++i)
            st.results.push_back(result_name(raw.args[i], raw.line));
        for (int i = ar.results; i < ar.results + ar.operands; ++i) {
            const ArgExpr& a = raw.args[i];
            if (op == OpKind::Power && i == ar.results + 1) {
                st.operands.push_back(power_exponent(a, raw.line));
            } else {
                st.operands.push_back(resolve_operand(a, raw.line));
            }
        }
        emit(std::move(st), raw.line);
    }

    OperandRef power_exponent(const ArgExpr& a, int line) {
        long double v = 0;
        if (a.kind == ArgExpr::Kind::Number || a.kind == ArgExpr::Kind::NumToHex) {
            v = eval_const(*a.expr, line);
        } else if (a.kind == ArgExpr::Kind::StrRef) {
            std::string name = resolve_ref(a, line);
            auto it = const_env.find(name);
            if (it == const_env.end())
                fail(diag::POWER_EXPONENT, "power exponent must be a compile-time integer constant",
                     line);
            v = fx::to_real(it->second);
        } else {
            fail(diag::POWER_EXPONENT, "power exponent must be a compile-time integer constant", line);
        }
        long double r = roundl(v);
        if (fabsl(v - r) > 1e-9L || r < -128 || r > 127)
            fail(diag::POWER_EXPONENT,
                 "power exponent must be an integer in [-128, 127], got " +
                     std::to_string(static_cast<double>(v)),
                 line);
        return OperandRef::make_const(fx::FixedValue{static_cast<int32_t>(static_cast<long>(r)) << 16});
    }

    void elaborate_lib_call(const RawStmt& raw) {
        if (raw.args.empty() || raw.args[0].kind != ArgExpr::Kind::StrRef || raw.args[0].index)
            fail(diag::SYNTAX, "Call_V needs a library label as its first argument", raw.line);
        const std::string& label = raw.args[0].base;
        const hwlib::LibraryEntry* entry = opts.library ? opts.library->lookup(label) : nullptr;
        if (!entry)
            fail(diag::UNKNOWN_LABEL, "library label '" + label + "' is not registered", raw.line);
        size_t want = 1 + entry->outputs.size() + entry->inputs.size();
        if (raw.args.size() != want)
            fail(diag::CALL_ARITY,
                 "Call_V(\"" + label + "\") takes " + std::to_string(entry->outputs.size()) +
                     " outputs and " + std::to_string(entry->inputs.size()) + " inputs",
                 raw.line);
        Statement st;
        st.op = OpKind::Call;
        st.call_label = label;
        size_t k = 1;
        for (size_t i = 0; i < entry->outputs.size(); ++i, ++k)
            st.results.push_back(result_name(raw.args[k], raw.line));
        for (size_t i = 0; i < entry->inputs.size(); ++i, ++k)
            st.operands.push_back(resolve_operand(raw.args[k], raw.line));
        emit(std::move(st), raw.line);
    }

    void elaborate_if(const RawStmt& raw) {
        int block = next_block++;

        Statement cond;
        cond.op = OpKind::IfCompare;
        cond.results.push_back(cond_wire_name(block));
        cond.operands.push_back(resolve_operand(raw.cmp_lhs, raw.line));
        cond.operands.push_back(resolve_operand(raw.cmp_rhs, raw.line));
        fx::parse_cmp(raw.cmp_token, &cond.cmp);
        cond.cond_block = block;
        emit(std::move(cond), raw.line);

        frames.push_back(BlockFrame{block, Branch::If});
        frame_defined.emplace_back();
        elaborate_stmts(raw.if_body);
        std::set<std::string> if_defined = std::move(frame_defined.back());
        frames.pop_back();
        frame_defined.pop_back();

        frames.push_back(BlockFrame{block, Branch::Else});
        frame_defined.emplace_back();
        elaborate_stmts(raw.else_body);
        std::set<std::string> else_defined = std::move(frame_defined.back());
        frames.pop_back();
        frame_defined.pop_back();

        // names assigned in either branch are visible after the block; the
        // tree builder reconciles them with padding and merge nodes
        for (const std::string& n : if_defined)
            define(n);
        for (const std::string& n : else_defined)
            define(n);
    }

    void elaborate_for(const RawStmt& raw) {
        long lo = raw.range_lo ? eval_int_const(*raw.range_lo, raw.line, "loop bound") : 0;
        long hi = eval_int_const(*raw.range_hi, raw.line, "loop bound");
        if (hi - lo > LOOP_CAP)
            fail(diag::CONST_RANGE, "loop unrolls to more than " + std::to_string(LOOP_CAP) +
                                        " iterations",
                 raw.line);
        for (long v = lo; v < hi; ++v) {
            loop_vars.emplace_back(raw.loop_var, static_cast<long double>(v));
            elaborate_stmts(raw.body);
            loop_vars.pop_back();
        }
    }

    void elaborate_stmts(const std::vector<RawStmt>& body) {
        for (const RawStmt& raw : body) {
            switch (raw.kind) {
            case RawStmt::Kind::Call: elaborate_call(raw); break;
            case RawStmt::Kind::For: elaborate_for(raw); break;
            case RawStmt::Kind::IfElse: elaborate_if(raw); break;
            }
        }
    }
};

} // namespace

ElabResult elaborate(const SourceProgram& prog, const ElabOptions& opts) {
    Elaborator e(prog, opts);
    e.elaborate_stmts(prog.body);
    ElabResult r;
    r.stmts = std::move(e.out);
    r.warnings = std::move(e.warnings);
    r.folded_count = e.folded;
    r.block_count = e.next_block;
    return r;
}

std::vector<Diagnostic> validate_rules(const SourceProgram& prog, const std::vector<Statement>& stmts,
                                       const hwlib::Library* library) {
    std::vector<Diagnostic> out;
    std::set<std::string> inputs;
    for (const std::string& n : prog.input_ports())
        inputs.insert(n);

    std::set<std::string> produced;
    for (const Statement& s : stmts) {
        for (const OperandRef& o : s.operands) {
            if (o.kind == OperandRef::Kind::BareLiteral)
                out.push_back({diag::BARE_LITERAL,
                               "numeric literal " + o.literal +
                                   " must be wrapped in number_to_hex(...)",
                               s.line, 0});
        }
        if (s.op == OpKind::Unknown)
            out.push_back({diag::UNKNOWN_FUNCTION,
                           "'" + s.unknown_name + "' is not a recognized function", s.line, 0});
        if (s.op == OpKind::Call && (!library || !library->lookup(s.call_label)))
            out.push_back({diag::UNKNOWN_LABEL,
                           "library label '" + s.call_label + "' is not registered", s.line, 0});

        std::set<std::string> result_set;
        for (const std::string& r : s.results) {
            if (!result_set.insert(r).second)
                out.push_back({diag::SELF_REFERENCE,
                               "result name '" + r + "' repeats within one statement", s.line, 0});
            for (const OperandRef& o : s.operands) {
                if (o.kind == OperandRef::Kind::Name && o.name == r) {
                    out.push_back({diag::SELF_REFERENCE,
                                   "result '" + r +
                                       "' also appears as an operand; use a fresh name per step",
                                   s.line, 0});
                    break;
                }
            }
            if (inputs.count(r))
                out.push_back(
                    {diag::WRITE_TO_INPUT, "statement assigns input port '" + r + "'", s.line, 0});
            produced.insert(r);
        }
    }

    for (const std::string& o : prog.output_ports()) {
        if (!produced.count(o))
            out.push_back({diag::UNASSIGNED_OUTPUT, "output '" + o + "' is never produced", 0, 0});
    }
    return out;
}

} // namespace hlsgen
