#include "hlsgen/vlint.hpp"

#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace hlsgen {

namespace {

struct ModulePorts {
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;

    bool has_port(const std::string& p) const {
        for (const auto& i : inputs)
            if (i == p) return true;
        for (const auto& o : outputs)
            if (o == p) return true;
        return false;
    }
    bool is_output(const std::string& p) const {
        for (const auto& o : outputs)
            if (o == p) return true;
        return false;
    }
    size_t count() const { return inputs.size() + outputs.size(); }
};

std::map<std::string, ModulePorts> catalog_ports() {
    std::map<std::string, ModulePorts> m;
    for (const char* two : {"Addition_V", "Subtraction_V", "Multiplication_V",
                            "Division_V", "Logarithm_V"})
        m[two] = {{"clk", "rst", "a", "b"}, {"r"}};
    m["Power_V"] = {{"clk", "rst", "a", "e"}, {"r"}};
    m["Sqrt_V"] = {{"clk", "rst", "a"}, {"r"}};
    m["Value_V"] = {{"clk", "rst", "a"}, {"r"}};
    m["SinCosTan_V"] = {{"clk", "rst", "a"}, {"s", "c", "t"}};
    m["Compare_V"] = {{"clk", "rst", "a", "b"}, {"r"}};
    m["Merge_V"] = {{"clk", "rst", "a", "b", "c"}, {"r"}};
    m["Delay_V"] = {{"clk", "rst", "d"}, {"q"}};
    return m;
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool starts_with(const std::string& s, const char* p) { return s.rfind(p, 0) == 0; }

// Identifiers appearing in an expression; numeric literals (12, 32'h..),
// and $system tokens are skipped.
std::vector<std::string> identifiers(const std::string& expr) {
    std::vector<std::string> out;
    size_t i = 0;
    while (i < expr.size()) {
        char ch = expr[i];
        if (std::isdigit(static_cast<unsigned char>(ch))) {
            while (i < expr.size() &&
                   (std::isalnum(static_cast<unsigned char>(expr[i])) || expr[i] == '\'' ||
                    expr[i] == '_'))
                ++i;
            continue;
        }
        if (ch == '\'') { // sized-less literal like 'd0
            ++i;
            while (i < expr.size() && std::isalnum(static_cast<unsigned char>(expr[i])))
                ++i;
            continue;
        }
        if (ch == '$' || std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
            size_t b = i;
            ++i;
            while (i < expr.size() &&
                   (std::isalnum(static_cast<unsigned char>(expr[i])) || expr[i] == '_' ||
                    expr[i] == '$'))
                ++i;
            if (expr[b] != '$') out.push_back(expr.substr(b, i - b));
            continue;
        }
        ++i;
    }
    return out;
}

size_t count_word(const std::string& line, const std::string& w) {
    size_t n = 0, pos = 0;
    while ((pos = line.find(w, pos)) != std::string::npos) {
        bool left_ok = pos == 0 || !(std::isalnum(static_cast<unsigned char>(line[pos - 1])) ||
                                     line[pos - 1] == '_');
        size_t end = pos + w.size();
        bool right_ok = end >= line.size() ||
                        !(std::isalnum(static_cast<unsigned char>(line[end])) ||
                          line[end] == '_');
        if (left_ok && right_ok) ++n;
        pos = end;
    }
    return n;
}

struct Instance {
    std::string module;
    std::string name;
    std::vector<std::pair<std::string, std::string>> conns; // port -> expr
};

struct ParsedModule {
    std::string file;
    std::string name;
    ModulePorts ports;
    std::set<std::string> declared; // ports + wires + regs
    std::set<std::string> regs;     // driven by always blocks
    std::vector<std::pair<std::string, std::string>> assigns; // lhs, rhs
    std::vector<Instance> instances;
};

// Parses the generated subset: ANSI header, wire/reg declarations, assigns,
// single-line instances, one always block for the wrapper.
ParsedModule parse_module(const std::string& file, const std::string& text,
                          std::vector<std::string>& problems) {
    ParsedModule pm;
    pm.file = file;
    std::istringstream in(text);
    std::string line;
    bool in_header = false;
    int always_depth = 0;
    bool in_always = false;

    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty() || starts_with(t, "//")) continue;

        if (in_always) {
            always_depth += static_cast<int>(count_word(t, "begin"));
            always_depth -= static_cast<int>(count_word(t, "end"));
            if (always_depth <= 0) in_always = false;
            continue;
        }
        if (starts_with(t, "always")) {
            int d = static_cast<int>(count_word(t, "begin")) -
                    static_cast<int>(count_word(t, "end"));
            if (d > 0) {
                in_always = true;
                always_depth = d;
            }
            continue;
        }

        if (starts_with(t, "module ")) {
            size_t paren = t.find('(');
            pm.name = trim(t.substr(7, paren == std::string::npos ? std::string::npos
                                                                  : paren - 7));
            in_header = true;
            continue;
        }
        if (in_header) {
            if (t == ");") {
                in_header = false;
                continue;
            }
            std::string p = t;
            if (!p.empty() && p.back() == ',') p.pop_back();
            std::vector<std::string> ids = identifiers(p);
            if (ids.size() < 2) continue;
            const std::string& pname = ids.back();
            pm.declared.insert(pname);
            if (ids[0] == "input") pm.ports.inputs.push_back(pname);
            else if (ids[0] == "output") pm.ports.outputs.push_back(pname);
            else problems.push_back(file + ": unparsable port line '" + t + "'");
            continue;
        }

        if (starts_with(t, "endmodule")) break;
        if (starts_with(t, "wire ") || starts_with(t, "reg ")) {
            if (t.back() != ';') {
                problems.push_back(file + ": unterminated declaration '" + t + "'");
                continue;
            }
            std::vector<std::string> ids = identifiers(t);
            if (ids.size() < 2) {
                problems.push_back(file + ": unparsable declaration '" + t + "'");
                continue;
            }
            pm.declared.insert(ids.back());
            if (ids[0] == "reg") pm.regs.insert(ids.back());
            continue;
        }
        if (starts_with(t, "assign ")) {
            size_t eq = t.find('=');
            size_t sc = t.rfind(';');
            if (eq == std::string::npos || sc == std::string::npos) {
                problems.push_back(file + ": unparsable assign '" + t + "'");
                continue;
            }
            std::string lhs = trim(t.substr(7, eq - 7));
            std::string rhs = trim(t.substr(eq + 1, sc - eq - 1));
            pm.assigns.emplace_back(lhs, rhs);
            continue;
        }

        // anything else must be a single-line instance: Mod [#(...)] name (...);
        if (t.back() != ';') {
            problems.push_back(file + ": unparsable line '" + t + "'");
            continue;
        }
        Instance inst;
        size_t i = 0;
        auto read_ident = [&]() {
            while (i < t.size() && std::isspace(static_cast<unsigned char>(t[i]))) ++i;
            size_t b = i;
            while (i < t.size() && (std::isalnum(static_cast<unsigned char>(t[i])) ||
                                    t[i] == '_'))
                ++i;
            return t.substr(b, i - b);
        };
        auto skip_parens = [&]() -> std::string {
            while (i < t.size() && t[i] != '(') ++i;
            if (i == t.size()) return "";
            int depth = 0;
            size_t b = i;
            for (; i < t.size(); ++i) {
                if (t[i] == '(') ++depth;
                if (t[i] == ')') {
                    --depth;
                    if (depth == 0) {
                        ++i;
                        return t.substr(b + 1, i - b - 2);
                    }
                }
            }
            return "";
        };
        inst.module = read_ident();
        while (i < t.size() && std::isspace(static_cast<unsigned char>(t[i]))) ++i;
        if (i < t.size() && t[i] == '#') skip_parens();
        inst.name = read_ident();
        std::string conns = skip_parens();
        if (inst.module.empty() || inst.name.empty()) {
            problems.push_back(file + ": unparsable instance '" + t + "'");
            continue;
        }
        // split top-level commas
        int depth = 0;
        std::string piece;
        std::vector<std::string> pieces;
        for (char c : conns) {
            if (c == '(') ++depth;
            if (c == ')') --depth;
            if (c == ',' && depth == 0) {
                pieces.push_back(piece);
                piece.clear();
            } else {
                piece += c;
            }
        }
        if (!trim(piece).empty()) pieces.push_back(piece);
        for (const std::string& pc : pieces) {
            std::string s = trim(pc);
            if (s.empty() || s[0] != '.') {
                problems.push_back(file + ": instance '" + inst.name +
                                   "' has a non-named connection '" + s + "'");
                continue;
            }
            size_t open = s.find('(');
            if (open == std::string::npos || s.back() != ')') {
                problems.push_back(file + ": bad connection '" + s + "'");
                continue;
            }
            inst.conns.emplace_back(trim(s.substr(1, open - 1)),
                                    trim(s.substr(open + 1, s.size() - open - 2)));
        }
        pm.instances.push_back(std::move(inst));
    }
    return pm;
}

} // namespace

std::vector<std::string> lint_design(const std::vector<GeneratedFile>& design_files,
                                     const hwlib::Library* library) {
    std::vector<std::string> problems;

    std::map<std::string, ModulePorts> known = catalog_ports();
    if (library) {
        for (const hwlib::LibraryEntry* e : library->entries()) {
            ModulePorts mp;
            mp.inputs = {"clk", "rst"};
            for (const std::string& p : e->inputs) mp.inputs.push_back(p);
            mp.outputs = e->outputs;
            known[e->label] = mp;
        }
    }

    std::vector<ParsedModule> mods;
    for (const GeneratedFile& f : design_files)
        mods.push_back(parse_module(f.name, f.content, problems));
    for (const ParsedModule& pm : mods) {
        if (pm.name.empty()) {
            problems.push_back(pm.file + ": no module found");
            continue;
        }
        known[pm.name] = pm.ports;
    }

    for (const ParsedModule& pm : mods) {
        std::map<std::string, int> drivers;
        std::set<std::string> reads;

        for (const std::string& p : pm.ports.inputs) drivers[p] += 1;
        for (const std::string& r : pm.regs) drivers[r] += 1;
        for (const auto& [lhs, rhs] : pm.assigns) {
            drivers[lhs] += 1;
            for (const std::string& id : identifiers(rhs)) reads.insert(id);
        }
        for (const Instance& inst : pm.instances) {
            auto it = known.find(inst.module);
            if (it == known.end()) {
                problems.push_back(pm.file + ": instance '" + inst.name +
                                   "' references unknown module '" + inst.module + "'");
                continue;
            }
            const ModulePorts& target = it->second;
            std::set<std::string> connected;
            for (const auto& [port, expr] : inst.conns) {
                if (!target.has_port(port)) {
                    problems.push_back(pm.file + ": instance '" + inst.name +
                                       "' connects nonexistent port '" + port + "'");
                    continue;
                }
                if (!connected.insert(port).second)
                    problems.push_back(pm.file + ": instance '" + inst.name +
                                       "' connects port '" + port + "' twice");
                bool is_ident = !expr.empty() &&
                                (std::isalpha(static_cast<unsigned char>(expr[0])) ||
                                 expr[0] == '_');
                if (target.is_output(port)) {
                    if (!is_ident)
                        problems.push_back(pm.file + ": instance '" + inst.name +
                                           "' drives a literal from output '" + port + "'");
                    else
                        drivers[expr] += 1;
                } else if (is_ident) {
                    for (const std::string& id : identifiers(expr)) reads.insert(id);
                }
            }
            if (connected.size() != target.count())
                problems.push_back(pm.file + ": instance '" + inst.name + "' connects " +
                                   std::to_string(connected.size()) + " of " +
                                   std::to_string(target.count()) + " ports of '" +
                                   inst.module + "'");
        }

        for (const std::string& r : reads) {
            if (!pm.declared.count(r)) {
                problems.push_back(pm.file + ": net '" + r + "' is read but never declared");
                continue;
            }
            if (!drivers.count(r))
                problems.push_back(pm.file + ": net '" + r + "' is read but never driven");
        }
        for (const auto& [net, n] : drivers) {
            if (n > 1)
                problems.push_back(pm.file + ": net '" + net + "' has " +
                                   std::to_string(n) + " drivers");
            if (!pm.declared.count(net))
                problems.push_back(pm.file + ": net '" + net + "' is driven but never declared");
        }
        for (const std::string& p : pm.ports.outputs)
            if (!drivers.count(p))
                problems.push_back(pm.file + ": output port '" + p + "' is never driven");
    }
    return problems;
}

} // namespace hlsgen
