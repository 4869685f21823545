#include "hlsgen/testbench.hpp"

#include <fstream>
#include <sstream>

#include "hlsgen/diagnostics.hpp"

namespace hlsgen {

namespace {

std::string vhex(fx::FixedValue v) { return "32'h" + fx::to_hex(v).substr(2); }

} // namespace

std::vector<std::map<std::string, fx::FixedValue>>
parse_stimulus_file(const TreeArray& tree, const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw CompileError({diag::SYNTAX, "cannot open stimulus file: " + path, 0, 0});
    std::vector<std::map<std::string, fx::FixedValue>> vectors;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::vector<std::string> toks;
        std::string t;
        while (ls >> t) toks.push_back(t);
        if (toks.empty()) continue;
        if (toks.size() != tree.input_ports.size())
            throw CompileError({diag::SYNTAX,
                                "stimulus line " + std::to_string(lineno) + " has " +
                                    std::to_string(toks.size()) + " values, design has " +
                                    std::to_string(tree.input_ports.size()) + " inputs",
                                lineno, 0});
        std::map<std::string, fx::FixedValue> vec;
        for (size_t i = 0; i < toks.size(); ++i) {
            const std::string& tok = toks[i];
            fx::FixedValue v;
            try {
                if (tok.rfind("0x", 0) == 0 || tok.rfind("0X", 0) == 0) {
                    v.raw = static_cast<int32_t>(
                        static_cast<uint32_t>(std::stoul(tok.substr(2), nullptr, 16)));
                } else {
                    v = fx::to_fixed(std::stold(tok));
                }
            } catch (const fx::EvalError& e) {
                throw CompileError({diag::CONST_RANGE, e.message(), lineno, 0});
            } catch (const std::exception&) {
                throw CompileError({diag::SYNTAX,
                                    "bad stimulus value '" + tok + "' on line " +
                                        std::to_string(lineno),
                                    lineno, 0});
            }
            vec[tree.input_ports[i]] = v;
        }
        vectors.push_back(std::move(vec));
    }
    return vectors;
}

TestbenchResult generate_testbench(const TreeArray& tree, const Schedule& sched,
                                   const TestbenchOptions& opt) {
    TestbenchResult res;

    // stimulus
    if (!opt.stimulus.empty()) {
        res.stimulus = opt.stimulus;
    } else {
        if (opt.range_lo_raw > opt.range_hi_raw)
            throw std::invalid_argument("stimulus range is empty");
        SplitMix64 rng(opt.seed);
        for (int v = 0; v < opt.vectors; ++v) {
            std::map<std::string, fx::FixedValue> vec;
            for (const std::string& in : tree.input_ports)
                vec[in] = draw_fixed(rng, opt.range_lo_raw, opt.range_hi_raw);
            res.stimulus.push_back(std::move(vec));
        }
    }

    // golden expectations
    bool asserts = opt.with_asserts;
    if (asserts) {
        for (const auto& vec : res.stimulus) {
            try {
                SimResult r = simulate_graph(tree, vec);
                for (const std::string& w : r.warnings.notes)
                    res.warnings.push_back("vector " +
                                           std::to_string(res.expected.size()) + ": " + w);
                res.expected.push_back(std::move(r.outputs));
            } catch (const SimUnsupported& e) {
                res.stimulus_only = true;
                asserts = false;
                res.warnings.push_back(std::string(e.what()) +
                                       "; generating a stimulus-only testbench");
                res.expected.clear();
                break;
            }
        }
    }

    std::set<std::string> approx = approx_outputs(tree);
    const int total = sched.total_cycles;

    std::string t;
    t += "`timescale 1ns/1ps\n";
    t += "// self-checking testbench for " + tree.design_name + "\n";
    t += "module tb_top;\n";
    t += "  reg clk;\n";
    t += "  reg rst;\n";
    if (opt.pipelined) t += "  reg start;\n";
    for (const std::string& in : tree.input_ports)
        t += "  reg signed [31:0] " + in + ";\n";
    for (const std::string& out : tree.output_ports)
        t += "  wire signed [31:0] " + out + ";\n";
    if (opt.pipelined) {
        t += "  wire busy;\n";
        t += "  wire valid;\n";
    }
    t += "  integer errors;\n";
    t += "  integer vec_errors;\n";
    if (asserts && !approx.empty()) t += "  integer diff;\n";
    t += "\n";

    t += "  " + tree.design_name + " dut (\n";
    t += "    .clk(clk),\n";
    t += "    .rst(rst),\n";
    if (opt.pipelined) t += "    .start(start),\n";
    for (const std::string& in : tree.input_ports)
        t += "    ." + in + "(" + in + "),\n";
    for (size_t i = 0; i < tree.output_ports.size(); ++i) {
        t += "    ." + tree.output_ports[i] + "(" + tree.output_ports[i] + ")";
        t += (opt.pipelined || i + 1 < tree.output_ports.size()) ? ",\n" : "\n";
    }
    if (opt.pipelined) {
        t += "    .busy(busy),\n";
        t += "    .valid(valid)\n";
    }
    t += "  );\n\n";
    t += "  always #5 clk = ~clk;\n\n";

    t += "  initial begin\n";
    t += "    $dumpfile(\"tb_top.vcd\");\n";
    t += "    $dumpvars(0, tb_top);\n";
    t += "    errors = 0;\n";
    t += "    vec_errors = 0;\n";
    t += "    clk = 1'b0;\n";
    t += "    rst = 1'b1;\n";
    if (opt.pipelined) t += "    start = 1'b0;\n";
    for (const std::string& in : tree.input_ports)
        t += "    " + in + " = 32'h00000000;\n";
    t += "    @(posedge clk);\n";
    t += "    @(posedge clk);\n";
    t += "    rst = 1'b0;\n\n";

    for (size_t v = 0; v < res.stimulus.size(); ++v) {
        std::string vn = std::to_string(v);
        t += "    // vector " + vn + "\n";
        for (const std::string& in : tree.input_ports)
            t += "    " + in + " = " + vhex(res.stimulus[v].at(in)) + ";\n";
        if (opt.pipelined) {
            t += "    start = 1'b1;\n";
            t += "    @(posedge clk);\n";
            t += "    start = 1'b0;\n";
            t += "    wait (valid);\n";
            t += "    @(posedge clk);\n";
            t += "    #1;\n";
        } else {
            t += "    repeat (" + std::to_string(total + 1) + ") @(posedge clk);\n";
            t += "    #1;\n";
        }
        if (asserts) {
            t += "    vec_errors = 0;\n";
            for (const std::string& out : tree.output_ports) {
                std::string want = vhex(res.expected[v].at(out));
                if (approx.count(out)) {
                    // approximated cone: 256 LSB (2^-8) tolerance
                    t += "    if ((^" + out + ") === 1'bx) begin\n";
                    t += "      vec_errors = vec_errors + 1;\n";
                    t += "      $display(\"FAIL vector " + vn + " " + out +
                         ": got X want " + want + "\");\n";
                    t += "    end else begin\n";
                    t += "      diff = " + out + " - " + want + ";\n";
                    t += "      if (diff < 0) diff = -diff;\n";
                    t += "      if (diff > 256) begin\n";
                    t += "        vec_errors = vec_errors + 1;\n";
                    t += "        $display(\"FAIL vector " + vn + " " + out +
                         ": got %h want " + want + " (tolerance 256)\", " + out + ");\n";
                    t += "      end\n";
                    t += "    end\n";
                } else {
                    t += "    if (" + out + " !== " + want + ") begin\n";
                    t += "      vec_errors = vec_errors + 1;\n";
                    t += "      $display(\"FAIL vector " + vn + " " + out +
                         ": got %h want " + want + "\", " + out + ");\n";
                    t += "    end\n";
                }
            }
            t += "    if (vec_errors == 0) $display(\"PASS vector " + vn + "\");\n";
            t += "    else errors = errors + vec_errors;\n";
        } else {
            t += "    $display(\"vector " + vn + " applied\");\n";
        }
        t += "\n";
    }

    if (asserts) {
        t += "    if (errors == 0) $display(\"ALL PASS (" +
             std::to_string(res.stimulus.size()) + " vectors)\");\n";
        t += "    else $display(\"TOTAL FAILURES: %0d\", errors);\n";
    } else {
        t += "    $display(\"stimulus-only run complete (" +
             std::to_string(res.stimulus.size()) + " vectors)\");\n";
    }
    t += "    $finish;\n";
    t += "  end\n";
    t += "endmodule\n";

    res.verilog = std::move(t);
    return res;
}

} // namespace hlsgen
