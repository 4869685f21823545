// Self-checking testbench generation: deterministic seeded stimulus,
// golden expectations from the evaluator, exact checks on exact cones and
// toleranced checks on approximated ones, and the stimulus-only fallback
// for designs that call user library modules.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "hlsgen/frontend.hpp"
#include "hlsgen/testbench.hpp"

using namespace hlsgen;

namespace {

struct Design {
    TreeArray tree;
    Schedule sched;
};

Design compile(const std::string& src, const std::string& name,
               const hwlib::Library* lib = nullptr) {
    SourceProgram p = parse_source(src, name);
    ElabResult e = elaborate(p, {.library = lib});
    TreeArray t = build_tree(e.stmts, p, LatencyTable{}, lib);
    pad_else_branch(t);
    insert_merges(t, LatencyTable{});
    Schedule s = schedule_asap(t);
    return {std::move(t), std::move(s)};
}

Design load_design(const std::string& stem) {
    std::ifstream f(std::string(CORPUS_DIR) + "/" + stem + ".vpy");
    REQUIRE_MESSAGE(f.good(), "missing example design: " << stem);
    std::stringstream ss;
    ss << f.rdbuf();
    return compile(ss.str(), stem);
}

size_t count_of(const std::string& text, const std::string& needle) {
    size_t n = 0;
    for (size_t at = text.find(needle); at != std::string::npos;
         at = text.find(needle, at + needle.size()))
        ++n;
    return n;
}

const char* tiny_src = R"(input_define("a", "b")
output_define("out")
Multiplication_V("m", "a", "a")
Addition_V("s", "m", "b")
Subtraction_V("out", "s", "m")
)";

// scratch directory holding a one-entry hardware library
struct TempLib {
    std::filesystem::path dir;
    hwlib::Library lib;

    TempLib() {
        dir = std::filesystem::temp_directory_path() /
              ("hlsgen_tb_lib_" + std::to_string(::getpid()));
        std::filesystem::remove_all(dir);
        std::filesystem::create_directories(dir);
        std::filesystem::path mod = dir / "mac_src.v";
        std::ofstream(mod) << "module MAC_V (input wire clk, input wire rst,\n"
                              "  input wire signed [31:0] x, input wire signed [31:0] y,\n"
                              "  output wire signed [31:0] r);\nendmodule\n";
        lib = hwlib::Library::open(dir.string());
        hwlib::LibraryEntry e;
        e.label = "mac";
        e.verilog_file = "MAC_V.v";
        e.inputs = {"x", "y"};
        e.outputs = {"r"};
        e.cycles = 3;
        lib.register_module(e, mod.string(), false);
    }
    ~TempLib() { std::filesystem::remove_all(dir); }
};

} // namespace

TEST_CASE("a one-vector bench is reproduced byte for byte") {
    Design d = compile(tiny_src, "tiny");
    TestbenchOptions opt;
    opt.vectors = 1;
    TestbenchResult r = generate_testbench(d.tree, d.sched, opt);
    CHECK(!r.stimulus_only);
    CHECK(r.warnings.empty());
    REQUIRE(r.stimulus.size() == 1);
    REQUIRE(r.expected.size() == 1);
    CHECK(r.verilog == R"TB(`timescale 1ns/1ps
// self-checking testbench for tiny
module tb_top;
  reg clk;
  reg rst;
  reg signed [31:0] a;
  reg signed [31:0] b;
  wire signed [31:0] out;
  integer errors;
  integer vec_errors;

  tiny dut (
    .clk(clk),
    .rst(rst),
    .a(a),
    .b(b),
    .out(out)
  );

  always #5 clk = ~clk;

  initial begin
    $dumpfile("tb_top.vcd");
    $dumpvars(0, tb_top);
    errors = 0;
    vec_errors = 0;
    clk = 1'b0;
    rst = 1'b1;
    a = 32'h00000000;
    b = 32'h00000000;
    @(posedge clk);
    @(posedge clk);
    rst = 1'b0;

    // vector 0
    a = 32'hFFFC9E56;
    b = 32'hFFFBC190;
    repeat (4) @(posedge clk);
    #1;
    vec_errors = 0;
    if (out !== 32'hFFFBC190) begin
      vec_errors = vec_errors + 1;
      $display("FAIL vector 0 out: got %h want 32'hFFFBC190", out);
    end
    if (vec_errors == 0) $display("PASS vector 0");
    else errors = errors + vec_errors;

    if (errors == 0) $display("ALL PASS (1 vectors)");
    else $display("TOTAL FAILURES: %0d", errors);
    $finish;
  end
endmodule
)TB");
}

TEST_CASE("the same seed reproduces the same bench, a new seed does not") {
    Design d = compile(tiny_src, "tiny");
    TestbenchOptions opt;
    TestbenchResult r1 = generate_testbench(d.tree, d.sched, opt);
    TestbenchResult r2 = generate_testbench(d.tree, d.sched, opt);
    CHECK(r1.verilog == r2.verilog);
    CHECK(r1.stimulus == r2.stimulus);
    CHECK(r1.expected == r2.expected);

    opt.seed = 2;
    TestbenchResult r3 = generate_testbench(d.tree, d.sched, opt);
    CHECK(r3.stimulus != r1.stimulus);
    CHECK(r3.verilog != r1.verilog);
}

TEST_CASE("stimulus draws stay inside the inclusive range") {
    SplitMix64 rng(99);
    bool hit_lo = false, hit_hi = false;
    for (int i = 0; i < 20000; ++i) {
        fx::FixedValue v = draw_fixed(rng, -3, 5);
        CHECK(v.raw >= -3);
        CHECK(v.raw <= 5);
        hit_lo = hit_lo || v.raw == -3;
        hit_hi = hit_hi || v.raw == 5;
    }
    CHECK(hit_lo);
    CHECK(hit_hi);

    SplitMix64 one(7);
    for (int i = 0; i < 10; ++i)
        CHECK(draw_fixed(one, 42, 42).raw == 42);

    Design d = compile(tiny_src, "tiny");
    TestbenchOptions opt;
    opt.range_lo_raw = 5;
    opt.range_hi_raw = 4;
    CHECK_THROWS_AS(generate_testbench(d.tree, d.sched, opt), std::invalid_argument);
}

TEST_CASE("expected values are exactly the golden evaluation of each vector") {
    for (const char* stem : {"magnitude", "demodulation", "mac16", "saturate"}) {
        Design d = load_design(stem);
        TestbenchOptions opt;
        opt.seed = 7;
        opt.vectors = 8;
        TestbenchResult r = generate_testbench(d.tree, d.sched, opt);
        REQUIRE(r.expected.size() == r.stimulus.size());
        for (size_t i = 0; i < r.stimulus.size(); ++i) {
            SimResult g = simulate_graph(d.tree, r.stimulus[i]);
            CHECK_MESSAGE(r.expected[i] == g.outputs, stem << " vector " << i);
        }
        // every expected word appears in the bench text
        for (const auto& vec : r.expected)
            for (const auto& [name, val] : vec) {
                char buf[16];
                std::snprintf(buf, sizeof buf, "32'h%08X", static_cast<uint32_t>(val.raw));
                CHECK_MESSAGE(r.verilog.find(buf) != std::string::npos, stem << " " << buf);
            }
    }
}

TEST_CASE("approximated outputs get an X guard and a 256-LSB window") {
    Design d = load_design("gain_db");
    TestbenchResult r = generate_testbench(d.tree, d.sched, {});
    CHECK(r.verilog.find("integer diff;") != std::string::npos);
    CHECK(count_of(r.verilog, "if ((^db) === 1'bx) begin") == 10);
    CHECK(count_of(r.verilog, "if (diff < 0) diff = -diff;") == 10);
    CHECK(count_of(r.verilog, "if (diff > 256) begin") == 10);
    CHECK(count_of(r.verilog, "(tolerance 256)") == 10);
    // no bit-exact comparison is emitted for the approximated output
    CHECK(r.verilog.find("if (db !==") == std::string::npos);

    // exact outputs compare with !== and carry no tolerance machinery
    Design t = compile(tiny_src, "tiny");
    TestbenchResult rt = generate_testbench(t.tree, t.sched, {});
    CHECK(count_of(rt.verilog, "if (out !== ") == 10);
    CHECK(rt.verilog.find("integer diff;") == std::string::npos);
    CHECK(rt.verilog.find("tolerance") == std::string::npos);
}

TEST_CASE("an unrolled bench holds inputs for the cycle count plus one") {
    Design t = compile(tiny_src, "tiny");
    TestbenchResult rt = generate_testbench(t.tree, t.sched, {});
    CHECK(t.sched.total_cycles == 3);
    CHECK(count_of(rt.verilog, "repeat (4) @(posedge clk);") == 10);

    Design m = load_design("mac16");
    TestbenchResult rm = generate_testbench(m.tree, m.sched, {});
    CHECK(m.sched.total_cycles == 17);
    CHECK(count_of(rm.verilog, "repeat (18) @(posedge clk);") == 10);
    CHECK(rm.verilog.find("start") == std::string::npos);
    CHECK(rm.verilog.find("valid") == std::string::npos);
}

TEST_CASE("a pipelined bench pulses start and samples one edge after valid") {
    Design d = compile(tiny_src, "tiny");
    TestbenchOptions opt;
    opt.pipelined = true;
    opt.vectors = 4;
    TestbenchResult r = generate_testbench(d.tree, d.sched, opt);
    CHECK(r.verilog.find("reg start;") != std::string::npos);
    CHECK(r.verilog.find("wire busy;") != std::string::npos);
    CHECK(r.verilog.find("wire valid;") != std::string::npos);
    CHECK(r.verilog.find(".start(start),") != std::string::npos);
    CHECK(r.verilog.find(".busy(busy),") != std::string::npos);
    CHECK(r.verilog.find(".valid(valid)") != std::string::npos);
    CHECK(count_of(r.verilog, "start = 1'b1;\n    @(posedge clk);\n    start = 1'b0;\n"
                              "    wait (valid);\n    @(posedge clk);") == 4);
    CHECK(r.verilog.find("repeat (") == std::string::npos);
    // expectations are mode-independent
    TestbenchOptions uopt;
    uopt.vectors = 4;
    TestbenchResult u = generate_testbench(d.tree, d.sched, uopt);
    CHECK(u.expected == r.expected);
    CHECK(u.stimulus == r.stimulus);
}

TEST_CASE("library calls fall back to a stimulus-only bench") {
    TempLib tl;
    std::string src = R"(input_define("p", "q")
output_define("r")
Call_V("mac", "r", "p", "q")
)";
    Design d = compile(src, "calls", &tl.lib);
    TestbenchResult r = generate_testbench(d.tree, d.sched, {});
    CHECK(r.stimulus_only);
    CHECK(r.expected.empty());
    CHECK(r.stimulus.size() == 10);
    REQUIRE(r.warnings.size() == 1);
    CHECK(r.warnings[0].find("generating a stimulus-only testbench") != std::string::npos);
    CHECK(count_of(r.verilog, "applied") == 10);
    CHECK(r.verilog.find("stimulus-only run complete (10 vectors)") != std::string::npos);
    CHECK(r.verilog.find("PASS vector") == std::string::npos);
    CHECK(r.verilog.find("!==") == std::string::npos);
}

TEST_CASE("disabling asserts keeps the stimulus but drops every check") {
    Design d = compile(tiny_src, "tiny");
    TestbenchOptions opt;
    opt.with_asserts = false;
    opt.vectors = 3;
    TestbenchResult r = generate_testbench(d.tree, d.sched, opt);
    CHECK(!r.stimulus_only); // the design itself is fully evaluatable
    CHECK(r.expected.empty());
    CHECK(r.stimulus.size() == 3);
    CHECK(count_of(r.verilog, "applied") == 3);
    CHECK(r.verilog.find("stimulus-only run complete (3 vectors)") != std::string::npos);
    CHECK(r.verilog.find("!==") == std::string::npos);

    // matches the seeded stimulus of an asserting bench
    TestbenchOptions aopt;
    aopt.vectors = 3;
    TestbenchResult a = generate_testbench(d.tree, d.sched, aopt);
    CHECK(a.stimulus == r.stimulus);
}

TEST_CASE("explicit stimulus replaces the random stream") {
    Design d = compile(tiny_src, "tiny");
    TestbenchOptions opt;
    opt.stimulus = {
        {{"a", fx::FixedValue{0x00010000}}, {"b", fx::FixedValue{0x00020000}}},
        {{"a", fx::FixedValue{static_cast<int32_t>(0xFFFF0000u)}}, {"b", fx::FixedValue{0}}}};
    TestbenchResult r = generate_testbench(d.tree, d.sched, opt);
    CHECK(r.stimulus == opt.stimulus);
    REQUIRE(r.expected.size() == 2);
    // out = (a*a + b) - a*a = b
    CHECK(r.expected[0].at("out").raw == 0x00020000);
    CHECK(r.expected[1].at("out").raw == 0);
    CHECK(r.verilog.find("a = 32'h00010000;") != std::string::npos);
    CHECK(r.verilog.find("ALL PASS (2 vectors)") != std::string::npos);
}

TEST_CASE("a domain fault in the stimulus surfaces as an evaluation error") {
    std::string src = R"(input_define("x")
output_define("r")
Sqrt_V("r", "x")
)";
    Design d = compile(src, "roots");
    TestbenchOptions opt;
    opt.range_lo_raw = -8 * 65536;
    opt.range_hi_raw = -1; // every draw is negative
    CHECK_THROWS_AS(generate_testbench(d.tree, d.sched, opt), fx::EvalError);

    // a non-fatal arithmetic note is forwarded as a vector-tagged warning
    std::string div_src = R"(input_define("x")
output_define("r")
Division_V("r", "x", number_to_hex(0))
)";
    Design dd = compile(div_src, "divz");
    TestbenchOptions dopt;
    dopt.vectors = 2;
    TestbenchResult r = generate_testbench(dd.tree, dd.sched, dopt);
    REQUIRE(r.warnings.size() == 2);
    CHECK(r.warnings[0].rfind("vector 0: ", 0) == 0);
    CHECK(r.warnings[1].rfind("vector 1: ", 0) == 0);
    CHECK(r.warnings[0].find("division by zero") != std::string::npos);
}

TEST_CASE("stimulus files accept hex and decimal and reject the rest") {
    Design d = compile(tiny_src, "tiny");
    std::filesystem::path p =
        std::filesystem::temp_directory_path() /
        ("hlsgen_stim_" + std::to_string(::getpid()) + ".txt");

    std::ofstream(p) << "# comment line\n"
                        "0x00010000 2.5\n"
                        "\n"
                        "-1.0 0x0000CCCD   # trailing comment\n";
    auto vecs = parse_stimulus_file(d.tree, p.string());
    REQUIRE(vecs.size() == 2);
    CHECK(vecs[0].at("a").raw == 0x00010000);
    CHECK(vecs[0].at("b").raw == 0x00028000);
    CHECK(vecs[1].at("a").raw == static_cast<int32_t>(0xFFFF0000u));
    CHECK(vecs[1].at("b").raw == 0x0000CCCD);

    std::ofstream(p) << "0x00010000\n";
    CHECK_THROWS_WITH_AS(parse_stimulus_file(d.tree, p.string()),
                         doctest::Contains("stimulus line 1 has 1 values, design has 2 inputs"),
                         CompileError);

    std::ofstream(p) << "1.0 banana\n";
    CHECK_THROWS_WITH_AS(parse_stimulus_file(d.tree, p.string()),
                         doctest::Contains("bad stimulus value 'banana' on line 1"),
                         CompileError);

    std::ofstream(p) << "1.0 99999.0\n";
    CHECK_THROWS_AS(parse_stimulus_file(d.tree, p.string()), CompileError);

    std::filesystem::remove(p);
    CHECK_THROWS_WITH_AS(parse_stimulus_file(d.tree, p.string()),
                         doctest::Contains("cannot open stimulus file"), CompileError);
}
