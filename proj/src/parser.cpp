#include "hlsgen/source.hpp"

#include <cctype>
#include <set>

#include "hlsgen/diagnostics.hpp"
#include "hlsgen/fixedpoint.hpp"

namespace hlsgen {

std::string array_element_name(const std::string& base, long index) {
    return "array_" + base + "_wire_" + std::to_string(index);
}

std::vector<std::string> expand_ports(const std::vector<PortDecl>& decls) {
    std::vector<std::string> out;
    for (const PortDecl& d : decls) {
        if (d.array_len == 0) {
            out.push_back(d.name);
        } else {
            for (int i = 0; i < d.array_len; ++i)
                out.push_back(array_element_name(d.name, i));
        }
    }
    return out;
}

std::vector<std::string> SourceProgram::input_ports() const { return expand_ports(inputs); }
std::vector<std::string> SourceProgram::output_ports() const { return expand_ports(outputs); }

namespace {

[[noreturn]] void fail(const char* code, const std::string& msg, int line, int col = 0) {
    throw CompileError(Diagnostic{code, msg, line, col});
}

// ---- tokens -----------------------------------------------------------------

struct Tok {
    enum class T {
        Ident, Number, String,
        LParen, RParen, LBracket, RBracket,
        Comma, Colon, Plus, Minus, Star, Slash,
        End,
    };
    T t = T::End;
    std::string s;        // Ident, String (content)
    long double num = 0;  // Number
    bool is_int = false;  // Number without '.' or exponent
    int col = 0;
};

std::vector<Tok> tokenize(const std::string& text, int lineno, int col_base) {
    std::vector<Tok> toks;
    size_t i = 0;
    auto push = [&](Tok::T t, size_t at) {
        Tok tk;
        tk.t = t;
        tk.col = col_base + static_cast<int>(at) + 1;
        toks.push_back(tk);
        return &toks.back();
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == ' ') {
            ++i;
            continue;
        }
        if (c == '\t')
            fail(diag::SYNTAX, "tab characters are not allowed", lineno, col_base + static_cast<int>(i) + 1);
        size_t start = i;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (i < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_'))
                ++i;
            push(Tok::T::Ident, start)->s = text.substr(start, i - start);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
            bool is_int = true;
            while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
                ++i;
            if (i < text.size() && text[i] == '.') {
                is_int = false;
                ++i;
                while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
                    ++i;
            }
            if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
                is_int = false;
                ++i;
                if (i < text.size() && (text[i] == '+' || text[i] == '-'))
                    ++i;
                if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i])))
                    fail(diag::SYNTAX, "malformed exponent in numeric literal", lineno,
                         col_base + static_cast<int>(i) + 1);
                while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
                    ++i;
            }
            Tok* tk = push(Tok::T::Number, start);
            tk->s = text.substr(start, i - start);
            tk->num = strtold(tk->s.c_str(), nullptr);
            tk->is_int = is_int;
            continue;
        }
        if (c == '"') {
            size_t end = text.find('"', i + 1);
            if (end == std::string::npos)
                fail(diag::SYNTAX, "unterminated string literal", lineno, col_base + static_cast<int>(i) + 1);
            push(Tok::T::String, start)->s = text.substr(i + 1, end - i - 1);
            i = end + 1;
            continue;
        }
        Tok::T t;
        switch (c) {
        case '(': t = Tok::T::LParen; break;
        case ')': t = Tok::T::RParen; break;
        case '[': t = Tok::T::LBracket; break;
        case ']': t = Tok::T::RBracket; break;
        case ',': t = Tok::T::Comma; break;
        case ':': t = Tok::T::Colon; break;
        case '+': t = Tok::T::Plus; break;
        case '-': t = Tok::T::Minus; break;
        case '*': t = Tok::T::Star; break;
        case '/': t = Tok::T::Slash; break;
        default:
            fail(diag::SYNTAX, std::string("unexpected character '") + c + "'", lineno,
                 col_base + static_cast<int>(i) + 1);
        }
        push(t, start);
        ++i;
    }
    Tok end;
    end.t = Tok::T::End;
    end.col = col_base + static_cast<int>(text.size()) + 1;
    toks.push_back(end);
    return toks;
}

// ---- token stream -----------------------------------------------------------

struct Stream {
    std::vector<Tok> toks;
    size_t i = 0;
    int line = 0;

    const Tok& peek() const { return toks[i]; }
    const Tok& get() { return toks[i + 1 < toks.size() ? i++ : i]; }
    bool at(Tok::T t) const { return toks[i].t == t; }
    bool accept(Tok::T t) {
        if (!at(t))
            return false;
        ++i;
        return true;
    }
    const Tok& expect(Tok::T t, const char* what) {
        if (!at(t))
            fail(diag::SYNTAX, std::string("expected ") + what, line, toks[i].col);
        return toks[i++];
    }
};

// ---- constant expressions ---------------------------------------------------

ConstExprPtr make_expr(ConstExpr::Op op) {
    auto e = std::make_shared<ConstExpr>();
    e->op = op;
    return e;
}

ConstExprPtr parse_expr(Stream& s);

ConstExprPtr parse_factor(Stream& s) {
    if (s.accept(Tok::T::Minus)) {
        auto e = make_expr(ConstExpr::Op::Neg);
        e->lhs = parse_factor(s);
        return e;
    }
    if (s.at(Tok::T::Number)) {
        const Tok& t = s.get();
        auto e = make_expr(ConstExpr::Op::Num);
        e->num = t.num;
        e->is_integer = t.is_int;
        return e;
    }
    if (s.at(Tok::T::Ident)) {
        const Tok& t = s.get();
        if (t.s == "pi")
            return make_expr(ConstExpr::Op::Pi);
        auto e = make_expr(ConstExpr::Op::Var);
        e->var = t.s;
        return e;
    }
    if (s.accept(Tok::T::LParen)) {
        ConstExprPtr e = parse_expr(s);
        s.expect(Tok::T::RParen, "')'");
        return e;
    }
    fail(diag::SYNTAX, "expected a constant expression", s.line, s.peek().col);
}

ConstExprPtr parse_term(Stream& s) {
    ConstExprPtr e = parse_factor(s);
    while (s.at(Tok::T::Star) || s.at(Tok::T::Slash)) {
        auto op = s.get().t == Tok::T::Star ? ConstExpr::Op::Mul : ConstExpr::Op::Div;
        auto n = make_expr(op);
        n->lhs = e;
        n->rhs = parse_factor(s);
        e = n;
    }
    return e;
}

ConstExprPtr parse_expr(Stream& s) {
    ConstExprPtr e = parse_term(s);
    while (s.at(Tok::T::Plus) || s.at(Tok::T::Minus)) {
        auto op = s.get().t == Tok::T::Plus ? ConstExpr::Op::Add : ConstExpr::Op::Sub;
        auto n = make_expr(op);
        n->lhs = e;
        n->rhs = parse_term(s);
        e = n;
    }
    return e;
}

// ---- name references --------------------------------------------------------

bool valid_base_name(const std::string& n) {
    if (n.empty() || !std::isalpha(static_cast<unsigned char>(n[0])))
        return false;
    for (char c : n)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
            return false;
    // the array_<name>_wire_<i> namespace belongs to elaborated array elements
    return n.rfind("array_", 0) != 0;
}

// Parses the content of a "name" or "name[expr]" string literal.
void parse_name_ref(const std::string& content, int lineno, int col, std::string* base,
                    ConstExprPtr* index) {
    Stream s{tokenize(content, lineno, col), 0, lineno};
    const Tok& id = s.expect(Tok::T::Ident, "signal name");
    if (!valid_base_name(id.s))
        fail(diag::SYNTAX,
             "invalid signal name '" + id.s +
                 "' (must start with a letter; the array_*_wire_* namespace is reserved)",
             lineno, col);
    *base = id.s;
    *index = nullptr;
    if (s.accept(Tok::T::LBracket)) {
        *index = parse_expr(s);
        s.expect(Tok::T::RBracket, "']'");
    }
    if (!s.at(Tok::T::End))
        fail(diag::SYNTAX, "trailing characters in signal reference \"" + content + "\"", lineno, col);
}

// ---- physical lines ---------------------------------------------------------

struct PLine {
    int indent = 0; // in levels (4 spaces each)
    int lineno = 0;
    std::vector<Tok> toks;
};

std::vector<PLine> split_lines(const std::string& text) {
    std::vector<PLine> out;
    int lineno = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t eol = text.find('\n', pos);
        std::string line = text.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
        pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();

        // strip comments; '#' cannot occur inside the dialect's string
        // literals, but respect quotes anyway
        bool in_str = false;
        for (size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"')
                in_str = !in_str;
            else if (line[i] == '#' && !in_str) {
                line.resize(i);
                break;
            }
        }

        size_t first = line.find_first_not_of(' ');
        if (first == std::string::npos) {
            if (line.find('\t') != std::string::npos)
                fail(diag::SYNTAX, "tab characters are not allowed", lineno);
            continue; // blank
        }
        if (line.find('\t') < first)
            fail(diag::SYNTAX, "indentation must use spaces, not tabs", lineno);
        if (first % 4 != 0)
            fail(diag::SYNTAX, "indentation must be a multiple of 4 spaces", lineno, 1);

        PLine pl;
        pl.indent = static_cast<int>(first / 4);
        pl.lineno = lineno;
        pl.toks = tokenize(line.substr(first), lineno, static_cast<int>(first));
        out.push_back(std::move(pl));
    }
    return out;
}

// ---- statement parsing ------------------------------------------------------

struct Parser {
    const std::vector<PLine>& lines;
    size_t i = 0;
    SourceProgram* prog;
    std::set<std::string> port_names;

    bool done() const { return i >= lines.size(); }
    const PLine& cur() const { return lines[i]; }

    std::vector<ArgExpr> parse_args(Stream& s) {
        std::vector<ArgExpr> args;
        s.expect(Tok::T::LParen, "'('");
        if (s.accept(Tok::T::RParen))
            return args;
        while (true) {
            args.push_back(parse_arg(s));
            if (s.accept(Tok::T::Comma))
                continue;
            s.expect(Tok::T::RParen, "')' or ','");
            break;
        }
        return args;
    }

    ArgExpr parse_arg(Stream& s) {
        ArgExpr a;
        a.line = s.line;
        a.col = s.peek().col;
        if (s.at(Tok::T::String)) {
            const Tok& t = s.get();
            a.kind = ArgExpr::Kind::StrRef;
            fx::Cmp c;
            if (fx::parse_cmp(t.s, &c)) {
                // comparison token for If_V; other consumers reject it later
                a.base = t.s;
                return a;
            }
            parse_name_ref(t.s, s.line, t.col, &a.base, &a.index);
            return a;
        }
        if (s.at(Tok::T::Ident)) {
            const Tok& t = s.get();
            if (t.s != "number_to_hex")
                fail(diag::SYNTAX, "unexpected identifier '" + t.s + "' in argument position", s.line,
                     t.col);
            s.expect(Tok::T::LParen, "'('");
            a.kind = ArgExpr::Kind::NumToHex;
            a.expr = parse_expr(s);
            s.expect(Tok::T::RParen, "')'");
            return a;
        }
        if (s.at(Tok::T::LBracket)) {
            s.get();
            a.kind = ArgExpr::Kind::NameList;
            if (!s.accept(Tok::T::RBracket)) {
                while (true) {
                    const Tok& t = s.expect(Tok::T::String, "string in name list");
                    a.names.push_back(t.s);
                    if (s.accept(Tok::T::Comma))
                        continue;
                    s.expect(Tok::T::RBracket, "']'");
                    break;
                }
            }
            return a;
        }
        if (s.at(Tok::T::Number) || s.at(Tok::T::Minus)) {
            bool neg = s.accept(Tok::T::Minus);
            const Tok& t = s.expect(Tok::T::Number, "number");
            a.kind = ArgExpr::Kind::Number;
            a.expr = make_expr(ConstExpr::Op::Num);
            a.expr->num = neg ? -t.num : t.num;
            a.expr->is_integer = t.is_int;
            a.literal_text = (neg ? "-" : "") + t.s;
            return a;
        }
        fail(diag::SYNTAX, "expected an argument", s.line, s.peek().col);
    }

    void parse_define(bool is_input, Stream& s, int lineno) {
        std::vector<ArgExpr> args = parse_args(s);
        if (!s.at(Tok::T::End))
            fail(diag::SYNTAX, "unexpected tokens after define", lineno, s.peek().col);
        if (args.empty())
            fail(diag::SYNTAX, "define requires at least one name", lineno);
        auto& list = is_input ? prog->inputs : prog->outputs;
        for (const ArgExpr& a : args) {
            if (a.kind != ArgExpr::Kind::StrRef)
                fail(diag::SYNTAX, "define arguments must be quoted names", lineno, a.col);
            PortDecl d;
            d.name = a.base;
            d.line = lineno;
            // names the generated module interface owns (clock, reset and
            // the pipelined handshake) cannot double as user ports
            for (const char* res : {"clk", "rst", "start", "busy", "valid"})
                if (d.name == res)
                    fail(diag::SYNTAX,
                         "port name '" + d.name + "' is reserved for the generated interface",
                         lineno, a.col);
            if (a.index) {
                if (a.index->op != ConstExpr::Op::Num || !a.index->is_integer || a.index->num < 1 ||
                    a.index->num > 4096)
                    fail(diag::SYNTAX, "array declaration needs an integer length, e.g. \"A[16]\"",
                         lineno, a.col);
                d.array_len = static_cast<int>(a.index->num);
            }
            if (!port_names.insert(d.name).second)
                fail(diag::DUPLICATE_PORT, "port name '" + d.name + "' declared twice", lineno, a.col);
            list.push_back(std::move(d));
            if (list.size() > 20)
                fail(diag::PORT_LIMIT,
                     std::string(is_input ? "input" : "output") +
                         " names exceed the limit of 20 (arrays count as one name)",
                     lineno, a.col);
        }
    }

    std::vector<RawStmt> parse_block(int indent, int if_depth, bool top_level) {
        std::vector<RawStmt> stmts;
        while (!done()) {
            const PLine& L = cur();
            if (L.indent < indent)
                break;
            if (L.indent > indent)
                fail(diag::SYNTAX, "unexpected indentation", L.lineno, L.indent * 4 + 1);

            Stream s{L.toks, 0, L.lineno};
            const Tok& head = s.expect(Tok::T::Ident, "statement");

            if (head.s == "for") {
                ++i;
                stmts.push_back(parse_for(s, L.lineno, indent, if_depth));
                continue;
            }
            if (head.s == "Else_V")
                fail(diag::SYNTAX, "Else_V without a matching If_V", L.lineno, head.col);
            if (head.s == "input_define" || head.s == "output_define") {
                if (!top_level)
                    fail(diag::SYNTAX, head.s + " is only allowed at the top level", L.lineno, head.col);
                ++i;
                parse_define(head.s == "input_define", s, L.lineno);
                continue;
            }
            if (head.s == "number_to_hex")
                fail(diag::SYNTAX, "number_to_hex is only valid inside an argument", L.lineno, head.col);

            if (head.s == "If_V") {
                ++i;
                stmts.push_back(parse_if(s, L.lineno, indent, if_depth));
                continue;
            }

            // plain call statement
            ++i;
            RawStmt st;
            st.kind = RawStmt::Kind::Call;
            st.line = L.lineno;
            st.call_name = head.s;
            st.args = parse_args(s);
            if (s.accept(Tok::T::Colon))
                fail(diag::SYNTAX, "only If_V, Else_V and for open a block", L.lineno, s.peek().col);
            if (!s.at(Tok::T::End))
                fail(diag::SYNTAX, "unexpected tokens after statement", L.lineno, s.peek().col);
            stmts.push_back(std::move(st));
        }
        return stmts;
    }

    RawStmt parse_for(Stream& s, int lineno, int indent, int if_depth) {
        RawStmt st;
        st.kind = RawStmt::Kind::For;
        st.line = lineno;
        const Tok& var = s.expect(Tok::T::Ident, "loop variable");
        if (!valid_base_name(var.s) || var.s == "pi")
            fail(diag::SYNTAX, "invalid loop variable '" + var.s + "'", lineno, var.col);
        st.loop_var = var.s;
        const Tok& in_kw = s.expect(Tok::T::Ident, "'in'");
        if (in_kw.s != "in")
            fail(diag::SYNTAX, "expected 'in'", lineno, in_kw.col);
        const Tok& range_kw = s.expect(Tok::T::Ident, "'range'");
        if (range_kw.s != "range")
            fail(diag::SYNTAX, "expected 'range'", lineno, range_kw.col);
        s.expect(Tok::T::LParen, "'('");
        ConstExprPtr first = parse_expr(s);
        if (s.accept(Tok::T::Comma)) {
            st.range_lo = first;
            st.range_hi = parse_expr(s);
        } else {
            st.range_hi = first;
        }
        s.expect(Tok::T::RParen, "')'");
        s.expect(Tok::T::Colon, "':'");
        if (!s.at(Tok::T::End))
            fail(diag::SYNTAX, "unexpected tokens after ':'", lineno, s.peek().col);
        st.body = parse_block(indent + 1, if_depth, false);
        return st;
    }

    RawStmt parse_if(Stream& s, int lineno, int indent, int if_depth) {
        if (if_depth >= 2)
            fail(diag::NESTING, "if/else nesting is limited to 2 levels", lineno);
        RawStmt st;
        st.kind = RawStmt::Kind::IfElse;
        st.line = lineno;
        std::vector<ArgExpr> args = parse_args(s);
        s.expect(Tok::T::Colon, "':'");
        if (!s.at(Tok::T::End))
            fail(diag::SYNTAX, "unexpected tokens after ':'", lineno, s.peek().col);
        if (args.size() != 3 && args.size() != 5)
            fail(diag::SYNTAX, "If_V takes 3 arguments (or 5 in the pipelined form)", lineno);
        auto value_arg = [&](const ArgExpr& a, const char* what) {
            if (a.kind != ArgExpr::Kind::StrRef && a.kind != ArgExpr::Kind::NumToHex &&
                a.kind != ArgExpr::Kind::Number)
                fail(diag::SYNTAX, std::string("If_V ") + what + " must be a name or constant", lineno,
                     a.col);
            return a;
        };
        st.cmp_lhs = value_arg(args[0], "first comparand");
        st.cmp_rhs = value_arg(args[1], "second comparand");
        if (args[2].kind != ArgExpr::Kind::StrRef || args[2].index)
            fail(diag::SYNTAX, "If_V condition must be a quoted comparison token", lineno, args[2].col);
        st.cmp_token = args[2].base;
        if (args.size() == 5) {
            if (args[3].kind != ArgExpr::Kind::NameList || args[4].kind != ArgExpr::Kind::NameList)
                fail(diag::SYNTAX, "pipelined If_V takes two name lists after the condition", lineno);
            st.has_io_decl = true;
            st.decl_inputs = args[3].names;
            st.decl_outputs = args[4].names;
        }
        st.if_body = parse_block(indent + 1, if_depth + 1, false);

        if (!done() && cur().indent == indent) {
            Stream peek{cur().toks, 0, cur().lineno};
            if (peek.at(Tok::T::Ident) && peek.peek().s == "Else_V") {
                int else_line = cur().lineno;
                ++i;
                peek.get();
                std::vector<ArgExpr> eargs = parse_args(peek);
                if (!eargs.empty())
                    fail(diag::SYNTAX, "Else_V takes no arguments", else_line);
                peek.expect(Tok::T::Colon, "':'");
                if (!peek.at(Tok::T::End))
                    fail(diag::SYNTAX, "unexpected tokens after ':'", else_line, peek.peek().col);
                st.else_body = parse_block(indent + 1, if_depth + 1, false);
            }
        }
        return st;
    }
};

// If_V condition tokens use a restricted comparison alphabet; validate early
// so the message points at the source line.
void check_cmp_token(const std::string& tok, int line) {
    fx::Cmp c;
    if (!fx::parse_cmp(tok, &c))
        fail(diag::SYNTAX,
             "unknown comparison token \"" + tok + "\" (expected >, <, >=, <=, == or !=)", line);
}

void check_cmp_tokens(const std::vector<RawStmt>& stmts) {
    for (const RawStmt& s : stmts) {
        switch (s.kind) {
        case RawStmt::Kind::Call: break;
        case RawStmt::Kind::For: check_cmp_tokens(s.body); break;
        case RawStmt::Kind::IfElse:
            check_cmp_token(s.cmp_token, s.line);
            check_cmp_tokens(s.if_body);
            check_cmp_tokens(s.else_body);
            break;
        }
    }
}

} // namespace

SourceProgram parse_source(const std::string& text, const std::string& design_name) {
    SourceProgram prog;
    prog.name = design_name;
    std::vector<PLine> lines = split_lines(text);
    Parser p{lines, 0, &prog, {}};
    prog.body = p.parse_block(0, 0, true);
    if (!p.done())
        fail(diag::SYNTAX, "unexpected indentation", p.cur().lineno);
    check_cmp_tokens(prog.body);
    return prog;
}

} // namespace hlsgen
