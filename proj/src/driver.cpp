#include "hlsgen/driver.hpp"

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hlsgen/codegen.hpp"
#include "hlsgen/diagnostics.hpp"
#include "hlsgen/estimator.hpp"
#include "hlsgen/fixedpoint.hpp"
#include "hlsgen/frontend.hpp"
#include "hlsgen/hwlib.hpp"
#include "hlsgen/schedule.hpp"
#include "hlsgen/simulate.hpp"
#include "hlsgen/source.hpp"
#include "hlsgen/testbench.hpp"
#include "hlsgen/tree.hpp"
#include "hlsgen/vlint.hpp"

namespace fs = std::filesystem;

namespace hlsgen {
namespace {

std::string read_text_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in)
        throw CompileError({diag::SYNTAX, "cannot open '" + p.string() + "'", 0, 0});
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out)
        throw InternalError("cannot write '" + p.string() + "'");
    out << content;
    out.flush();
    if (!out)
        throw InternalError("short write on '" + p.string() + "'");
}

bool valid_identifier(const std::string& s) {
    if (s.empty())
        return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_'))
        return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
            return false;
    return true;
}

// Verilog keywords a module must not be named after; everything the
// generated and catalog RTL uses plus the common net/strength types.
bool verilog_keyword(const std::string& s) {
    static const std::set<std::string> kw = {
        "always",   "assign",   "begin",    "case",     "default", "else",    "end",
        "endcase",  "endfunction", "endmodule", "for",   "function", "if",     "initial",
        "inout",    "input",    "integer",  "localparam", "module", "negedge", "or",
        "output",   "parameter", "posedge", "reg",      "repeat",  "signed",  "supply0",
        "supply1",  "tri",      "tri0",     "tri1",     "wand",    "while",   "wire",
        "wor",
    };
    return kw.count(s) != 0;
}

// File stem -> Verilog-safe module name.
std::string sanitize_name(const std::string& stem) {
    std::string s;
    for (char c : stem)
        s += (std::isalnum(static_cast<unsigned char>(c)) || c == '_') ? c : '_';
    if (!valid_identifier(s) || verilog_keyword(s))
        s = "design_" + s;
    if (!valid_identifier(s))
        s = "design";
    return s;
}

// "lo:hi" in real units -> inclusive raw bounds.
void parse_range(const std::string& spec, int32_t& lo_raw, int32_t& hi_raw) {
    auto colon = spec.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 >= spec.size())
        throw std::invalid_argument("--range expects lo:hi, e.g. -4.0:4.0");
    try {
        size_t used = 0;
        std::string lo_s = spec.substr(0, colon), hi_s = spec.substr(colon + 1);
        long double lo = std::stold(lo_s, &used);
        if (used != lo_s.size())
            throw std::invalid_argument("--range: trailing characters in '" + lo_s + "'");
        long double hi = std::stold(hi_s, &used);
        if (used != hi_s.size())
            throw std::invalid_argument("--range: trailing characters in '" + hi_s + "'");
        lo_raw = fx::to_fixed(lo).raw;
        hi_raw = fx::to_fixed(hi).raw;
    } catch (const fx::EvalError& e) {
        throw std::invalid_argument("--range: " + e.message());
    } catch (const std::out_of_range&) {
        throw std::invalid_argument("--range bound not representable");
    }
    if (lo_raw > hi_raw)
        throw std::invalid_argument("--range lower bound exceeds upper bound");
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty())
                out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur += c;
        }
    }
    if (!cur.empty())
        out.push_back(cur);
    return out;
}

std::string join(const std::vector<std::string>& v, const char* sep) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i)
            s += sep;
        s += v[i];
    }
    return s;
}

// True when `text` contains a `module <name>` header (word boundaries on
// both sides, so `endmodule` does not count).
bool defines_module(const std::string& text, const std::string& name) {
    auto word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
    for (size_t pos = 0; (pos = text.find("module", pos)) != std::string::npos; pos += 6) {
        if (pos > 0 && word(text[pos - 1]))
            continue;
        size_t q = pos + 6;
        if (q >= text.size() || !std::isspace(static_cast<unsigned char>(text[q])))
            continue;
        while (q < text.size() && std::isspace(static_cast<unsigned char>(text[q])))
            ++q;
        size_t r = q;
        while (r < text.size() && word(text[r]))
            ++r;
        if (text.compare(q, r - q, name) == 0)
            return true;
    }
    return false;
}

// ---- shared front half of build/estimate/simulate ---------------------------

struct DesignOpts {
    std::string input;
    std::string name_override;
    std::string lib_dir;
    bool pipelined = false;
    std::string costs_file;
    std::vector<std::string> cost_overrides;
};

struct CompiledDesign {
    SourceProgram prog;
    ElabResult elab;
    TreeArray tree;
    Schedule sched;
    hwlib::Library lib;
    bool has_lib = false;

    const hwlib::Library* lib_ptr() const { return has_lib ? &lib : nullptr; }
};

CompiledDesign compile_design(const DesignOpts& d) {
    CompiledDesign c;
    if (!d.lib_dir.empty()) {
        c.lib = hwlib::Library::open(d.lib_dir);
        c.has_lib = true;
    }

    std::string name;
    if (d.name_override.empty()) {
        name = sanitize_name(fs::path(d.input).stem().string());
    } else {
        if (!valid_identifier(d.name_override) || verilog_keyword(d.name_override))
            throw std::invalid_argument("--name must be a non-keyword identifier, got '" +
                                        d.name_override + "'");
        name = d.name_override;
    }

    c.prog = parse_source(read_text_file(d.input), name);

    ElabOptions eo;
    eo.library = c.lib_ptr();
    c.elab = elaborate(c.prog, eo);
    for (const auto& w : c.elab.warnings)
        std::cerr << "warning: " << w << "\n";

    auto diags = validate_rules(c.prog, c.elab.stmts, c.lib_ptr());
    if (!diags.empty()) {
        for (size_t i = 1; i < diags.size(); ++i)
            std::cerr << diags[i].str() << "\n";
        throw CompileError(diags.front());
    }

    LatencyTable latencies; // one cycle per catalog operator; calls use entry cycles
    c.tree = build_tree(c.elab.stmts, c.prog, latencies, c.lib_ptr());
    pad_else_branch(c.tree);
    insert_merges(c.tree, latencies);
    c.sched = schedule_asap(c.tree);
    return c;
}

CostTable make_costs(const DesignOpts& d) {
    CostTable t = CostTable::defaults();
    if (!d.costs_file.empty())
        load_cost_file(t, d.costs_file);
    for (const auto& kv : d.cost_overrides)
        apply_cost_override(t, kv);
    return t;
}

// ---- build -------------------------------------------------------------------

struct BuildOpts {
    DesignOpts design;
    std::string out_dir;
    uint64_t seed = 1;
    int vectors = 10;
    std::string range_spec;
    bool no_assert = false;
    std::string stim_file;
    bool no_report = false;
    bool dump_ir_flag = false;
    bool dump_schedule_flag = false;
};

int do_build(const BuildOpts& b) {
    if (b.vectors < 1)
        throw std::invalid_argument("--vectors must be at least 1");

    CompiledDesign c = compile_design(b.design);

    if (b.dump_ir_flag)
        std::cout << dump_ir(c.tree);
    if (b.dump_schedule_flag)
        std::cout << dump_schedule(c.tree, c.sched);

    CodegenOptions co;
    co.pipelined = b.design.pipelined;
    co.library = c.lib_ptr();
    std::vector<GeneratedFile> design_files = emit_design(c.tree, c.sched, co);

    auto findings = lint_design(design_files, c.lib_ptr());
    if (!findings.empty()) {
        std::string msg = "generated Verilog failed structural checks:";
        for (const auto& f : findings)
            msg += "\n  " + f;
        throw InternalError(msg);
    }

    TestbenchOptions to;
    to.seed = b.seed;
    to.vectors = b.vectors;
    to.pipelined = b.design.pipelined;
    to.with_asserts = !b.no_assert;
    if (!b.range_spec.empty())
        parse_range(b.range_spec, to.range_lo_raw, to.range_hi_raw);
    if (!b.stim_file.empty())
        to.stimulus = parse_stimulus_file(c.tree, b.stim_file);
    TestbenchResult tb = generate_testbench(c.tree, c.sched, to);
    for (const auto& w : tb.warnings)
        std::cerr << "warning: " << w << "\n";

    std::vector<GeneratedFile> artifacts = design_files;
    artifacts.push_back({"tb_top.v", tb.verilog});
    for (auto& f : function_library_files())
        artifacts.push_back({"lib/" + f.name, std::move(f.content)});

    // Verilog for every library module the design calls travels with the build.
    std::set<std::string> call_labels;
    for (const auto& n : c.tree.nodes)
        if (n.op == OpKind::Call)
            call_labels.insert(n.call_label);
    for (const auto& label : call_labels) {
        const hwlib::LibraryEntry* e = c.lib.lookup(label);
        if (!e)
            throw InternalError("call label missing from library after validation: " + label);
        fs::path src = c.lib.dir() / e->verilog_file;
        if (!fs::exists(src))
            throw hwlib::LibError(hwlib::LibError::Kind::MissingFile,
                                  "library file for '" + label + "' missing: " + src.string());
        artifacts.push_back({"lib/" + e->verilog_file, read_text_file(src)});
    }

    if (!b.no_report) {
        Estimate est = estimate(c.tree, c.sched, make_costs(b.design), b.design.pipelined);
        artifacts.push_back({"report.txt", emit_report(c.tree, c.sched, est, b.design.pipelined)});
    }

    // Stage next to the target, then swap, so an interrupted build never
    // leaves a half-written output directory.
    fs::path out = b.out_dir;
    fs::path stage = out;
    stage += ".stage";
    std::error_code ec;
    fs::remove_all(stage, ec);
    if (!out.parent_path().empty())
        fs::create_directories(out.parent_path());
    fs::create_directories(stage / "lib");
    for (const auto& f : artifacts)
        write_text_file(stage / f.name, f.content);
    fs::remove_all(out);
    fs::rename(stage, out);

    std::cout << "design " << c.tree.design_name << ": " << c.tree.nodes.size() << " nodes, "
              << c.sched.total_cycles << " cycles ("
              << (b.design.pipelined ? "pipelined" : "unrolled") << ")\n";
    for (const auto& f : artifacts)
        std::cout << "wrote " << (out / f.name).generic_string() << "\n";
    return 0;
}

// ---- estimate ------------------------------------------------------------------

int do_estimate(const DesignOpts& d) {
    CompiledDesign c = compile_design(d);
    Estimate est = estimate(c.tree, c.sched, make_costs(d), d.pipelined);
    std::cout << emit_report(c.tree, c.sched, est, d.pipelined);
    return 0;
}

// ---- simulate ------------------------------------------------------------------

struct SimOpts {
    DesignOpts design;
    uint64_t seed = 1;
    int vectors = 10;
    std::string range_spec;
    std::string stim_file;
};

int do_simulate(const SimOpts& s) {
    if (s.vectors < 1)
        throw std::invalid_argument("--vectors must be at least 1");

    CompiledDesign c = compile_design(s.design);

    int32_t lo_raw = -8 * 65536, hi_raw = 8 * 65536;
    if (!s.range_spec.empty())
        parse_range(s.range_spec, lo_raw, hi_raw);

    std::vector<std::map<std::string, fx::FixedValue>> vectors;
    if (!s.stim_file.empty()) {
        vectors = parse_stimulus_file(c.tree, s.stim_file);
    } else {
        SplitMix64 rng(s.seed);
        for (int v = 0; v < s.vectors; ++v) {
            std::map<std::string, fx::FixedValue> vec;
            for (const std::string& in : c.tree.input_ports)
                vec[in] = draw_fixed(rng, lo_raw, hi_raw);
            vectors.push_back(std::move(vec));
        }
    }

    int faults = 0;
    for (size_t v = 0; v < vectors.size(); ++v) {
        std::cout << "vector " << v << ":\n";
        for (const std::string& p : c.tree.input_ports) {
            fx::FixedValue x = vectors[v].at(p);
            std::cout << "  in  " << p << " = " << fx::to_hex(x) << " (" << fx::to_decimal(x)
                      << ")\n";
        }
        try {
            SimResult r = simulate_graph(c.tree, vectors[v]);
            for (const std::string& p : c.tree.output_ports) {
                fx::FixedValue x = r.outputs.at(p);
                std::cout << "  out " << p << " = " << fx::to_hex(x) << " (" << fx::to_decimal(x)
                          << ")\n";
            }
            for (const auto& n : r.warnings.notes)
                std::cout << "  warning: " << n << "\n";
        } catch (const fx::EvalError& e) {
            std::cout << "  fault: " << e.message() << "\n";
            ++faults;
        }
    }
    std::cout << "simulated " << vectors.size() << " vectors";
    if (faults)
        std::cout << ", " << faults << " faulted";
    std::cout << "\n";
    return faults ? 2 : 0;
}

// ---- lib add / lib list ----------------------------------------------------------

struct LibAddOpts {
    std::string lib_dir;
    std::string label;
    std::string file;
    std::string inputs_csv;
    std::string outputs_csv;
    int cycles = 1;
    long lut = 0, ff = 0, dsp = 0, bram = 0;
    bool force = false;
};

int do_lib_add(const LibAddOpts& a) {
    if (!valid_identifier(a.label))
        throw std::invalid_argument("label must be an identifier (letters, digits, '_'), got '" +
                                    a.label + "'");
    if (a.cycles < 1)
        throw std::invalid_argument("--cycles must be at least 1");
    if (a.lut < 0 || a.ff < 0 || a.dsp < 0 || a.bram < 0)
        throw std::invalid_argument("resource figures must be non-negative");

    hwlib::LibraryEntry entry;
    entry.label = a.label;
    entry.verilog_file = a.label + ".v";
    entry.inputs = split_csv(a.inputs_csv);
    entry.outputs = split_csv(a.outputs_csv);
    entry.cycles = a.cycles;
    entry.resources = {a.lut, a.ff, a.dsp, a.bram};
    for (const auto& lists : {entry.inputs, entry.outputs})
        for (const auto& n : lists)
            if (!valid_identifier(n))
                throw std::invalid_argument("port name must be an identifier, got '" + n + "'");

    if (!fs::exists(a.file))
        throw hwlib::LibError(hwlib::LibError::Kind::MissingFile, "no such file: " + a.file);
    if (!defines_module(read_text_file(a.file), a.label))
        throw hwlib::LibError(hwlib::LibError::Kind::MissingFile,
                              "'" + a.file + "' does not define module '" + a.label + "'");

    hwlib::Library lib = hwlib::Library::open(a.lib_dir);
    lib.register_module(entry, a.file, a.force);
    std::cout << "registered '" << a.label << "' (" << a.cycles << " cycles, "
              << entry.inputs.size() << " in, " << entry.outputs.size() << " out) in " << a.lib_dir
              << "\n";
    return 0;
}

int do_lib_list(const std::string& dir) {
    hwlib::Library lib = hwlib::Library::open(dir);
    auto entries = lib.entries();
    std::cout << "library " << dir << ": " << entries.size()
              << (entries.size() == 1 ? " module\n" : " modules\n");
    for (const hwlib::LibraryEntry* e : entries) {
        std::cout << e->label << ": cycles=" << e->cycles << " in=" << join(e->inputs, ",")
                  << " out=" << join(e->outputs, ",") << " lut=" << e->resources.lut
                  << " ff=" << e->resources.ff << " dsp=" << e->resources.dsp
                  << " bram=" << e->resources.bram << " file=" << e->verilog_file << "\n";
    }
    return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"dataflow-to-Verilog generator (Q16.16 fixed point)"};
    app.require_subcommand(1);

    BuildOpts b;
    DesignOpts est;
    SimOpts sim_opts;
    LibAddOpts la;
    std::string list_dir;

    auto add_design_opts = [](CLI::App* cmd, DesignOpts& d, bool with_costs) {
        cmd->add_option("input", d.input, "design source file")->required();
        cmd->add_option("--name", d.name_override, "module name (default: file stem)");
        cmd->add_option("--lib", d.lib_dir, "hardware library directory for Call_V");
        if (with_costs) {
            cmd->add_flag("--pipelined", d.pipelined,
                          "balance levels with delay chains and add a start/valid wrapper");
            cmd->add_option("--costs", d.costs_file, "cost file (key.field=value per line)");
            cmd->add_option("--set", d.cost_overrides,
                            "single cost override key.field=value (repeatable)");
        }
    };

    CLI::App* build = app.add_subcommand("build", "compile a design to Verilog, testbench and report");
    add_design_opts(build, b.design, true);
    build->add_option("-o,--out", b.out_dir, "output directory")->required();
    build->add_option("--seed", b.seed, "stimulus seed (default 1)");
    build->add_option("--vectors", b.vectors, "number of test vectors (default 10)");
    build->add_option("--range", b.range_spec, "stimulus range lo:hi in real units (default -8:8)");
    build->add_flag("--no-assert", b.no_assert, "drive stimulus but skip output checks");
    build->add_option("--stim", b.stim_file, "explicit stimulus file, one vector per line");
    build->add_flag("--no-report", b.no_report, "skip report.txt");
    build->add_flag("--dump-ir", b.dump_ir_flag, "print the operator table");
    build->add_flag("--dump-schedule", b.dump_schedule_flag, "print levels and delay chains");

    CLI::App* estimate_cmd =
        app.add_subcommand("estimate", "print the cycle and resource report without writing files");
    add_design_opts(estimate_cmd, est, true);

    CLI::App* simulate_cmd =
        app.add_subcommand("simulate", "evaluate the design on stimulus and print every vector");
    add_design_opts(simulate_cmd, sim_opts.design, false);
    simulate_cmd->add_option("--seed", sim_opts.seed, "stimulus seed (default 1)");
    simulate_cmd->add_option("--vectors", sim_opts.vectors, "number of vectors (default 10)");
    simulate_cmd->add_option("--range", sim_opts.range_spec,
                             "stimulus range lo:hi in real units (default -8:8)");
    simulate_cmd->add_option("--stim", sim_opts.stim_file, "explicit stimulus file");

    CLI::App* lib_cmd = app.add_subcommand("lib", "manage a hardware module library");
    lib_cmd->require_subcommand(1);
    CLI::App* lib_add = lib_cmd->add_subcommand("add", "register a synthesized module");
    lib_add->add_option("label", la.label, "library label (= Verilog module name)")->required();
    lib_add->add_option("file", la.file, "Verilog source to copy into the library")->required();
    lib_add->add_option("--lib", la.lib_dir, "library directory")->required();
    lib_add->add_option("--inputs", la.inputs_csv, "comma-separated input ports")->required();
    lib_add->add_option("--outputs", la.outputs_csv, "comma-separated output ports")->required();
    lib_add->add_option("--cycles", la.cycles, "latency in cycles (default 1)");
    lib_add->add_option("--lut", la.lut, "LUT count");
    lib_add->add_option("--ff", la.ff, "flip-flop count");
    lib_add->add_option("--dsp", la.dsp, "DSP block count");
    lib_add->add_option("--bram", la.bram, "block RAM count");
    lib_add->add_flag("--force", la.force, "replace an existing label");
    CLI::App* lib_list = lib_cmd->add_subcommand("list", "print registered modules");
    lib_list->add_option("--lib", list_dir, "library directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (build->parsed())
            return do_build(b);
        if (estimate_cmd->parsed())
            return do_estimate(est);
        if (simulate_cmd->parsed())
            return do_simulate(sim_opts);
        if (lib_cmd->parsed()) {
            if (lib_add->parsed())
                return do_lib_add(la);
            if (lib_list->parsed())
                return do_lib_list(list_dir);
        }
        return 1;
    } catch (const CompileError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const SimUnsupported& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::cerr << "hint: designs with Call_V cannot be evaluated in software; build with "
                     "--no-assert for a stimulus-only testbench\n";
        return 2;
    } catch (const hwlib::LibError& e) {
        std::cerr << "error: " << e.what() << "\n";
        using K = hwlib::LibError::Kind;
        return (e.kind() == K::CorruptManifest || e.kind() == K::LockTimeout) ? 3 : 2;
    } catch (const fx::EvalError& e) {
        std::cerr << "error: " << e.message() << "\n";
        std::cerr << "hint: constrain stimulus with --range lo:hi or disable checks with "
                     "--no-assert\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace hlsgen
