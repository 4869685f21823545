// Functional evaluation and cycle-accurate schedule replay.  The two
// evaluators are independent implementations; bit-for-bit agreement between
// them on every design is the core correctness check for delay insertion.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "hlsgen/frontend.hpp"
#include "hlsgen/simulate.hpp"
#include "hlsgen/testbench.hpp"

using namespace hlsgen;
using Vec = std::map<std::string, fx::FixedValue>;

namespace {

TreeArray build(const std::string& src, const std::string& name = "t",
                const LatencyTable& lat = {}) {
    SourceProgram p = parse_source(src, name);
    ElabResult e = elaborate(p);
    TreeArray t = build_tree(e.stmts, p, lat);
    pad_else_branch(t);
    insert_merges(t, lat);
    return t;
}

TreeArray load_design(const std::string& stem) {
    std::ifstream f(std::string(CORPUS_DIR) + "/" + stem + ".vpy");
    REQUIRE_MESSAGE(f.good(), "missing example design: " << stem);
    std::stringstream ss;
    ss << f.rdbuf();
    return build(ss.str(), stem);
}

fx::FixedValue fixed(long double x) { return fx::to_fixed(x); }

} // namespace

TEST_CASE("straight-line arithmetic matches hand evaluation") {
    TreeArray t = build(R"(input_define("a", "b")
output_define("out")
Multiplication_V("m", "a", "b")
Addition_V("s", "m", "a")
Subtraction_V("out", "s", "b")
)");
    Vec in{{"a", fixed(1.5L)}, {"b", fixed(0.25L)}};
    SimResult g = simulate_graph(t, in);
    // 1.5*0.25 = 0.375; +1.5 = 1.875; -0.25 = 1.625
    CHECK(g.outputs.at("out").raw == 0x0001A000);
    CHECK(g.warnings.notes.empty());

    SimResult s = simulate_scheduled(t, schedule_asap(t), in);
    CHECK(s.outputs.at("out") == g.outputs.at("out"));
}

TEST_CASE("both branches evaluate and the merge selects") {
    TreeArray t = build(R"(input_define("x")
output_define("r")
If_V("x", number_to_hex(0), ">"):
    Addition_V("v", "x", number_to_hex(1))
Else_V():
    Subtraction_V("v", "x", number_to_hex(1))
Value_V("r", "v")
)");
    Schedule s = schedule_asap(t);
    CHECK(simulate_graph(t, {{"x", fixed(2.0L)}}).outputs.at("r") == fixed(3.0L));
    CHECK(simulate_graph(t, {{"x", fixed(-2.0L)}}).outputs.at("r") == fixed(-3.0L));
    // the boundary: 0 > 0 is false, so the else branch wins
    CHECK(simulate_graph(t, {{"x", fx::FixedValue{0}}}).outputs.at("r") == fixed(-1.0L));
    for (long double x : {2.0L, -2.0L, 0.0L})
        CHECK(simulate_scheduled(t, s, {{"x", fixed(x)}}).outputs.at("r") ==
              simulate_graph(t, {{"x", fixed(x)}}).outputs.at("r"));
}

TEST_CASE("a domain fault in the not-taken branch still faults") {
    TreeArray t = build(R"(input_define("x")
output_define("r")
If_V("x", number_to_hex(0), ">"):
    Sqrt_V("v", "x")
Else_V():
    Value_V("v", number_to_hex(0))
Value_V("r", "v")
)");
    // x = -1 selects the else branch, but the hardware still computes the
    // if branch, so its sqrt faults
    CHECK_THROWS_AS(simulate_graph(t, {{"x", fixed(-1.0L)}}), fx::EvalError);
    CHECK(simulate_graph(t, {{"x", fixed(4.0L)}}).outputs.at("r") == fixed(2.0L));
}

TEST_CASE("division by zero saturates and warns instead of faulting") {
    TreeArray t = build(R"(input_define("a", "b")
output_define("q")
Division_V("q", "a", "b")
)");
    SimResult r = simulate_graph(t, {{"a", fixed(2.0L)}, {"b", fx::FixedValue{0}}});
    CHECK(r.outputs.at("q").raw == INT32_MAX);
    CHECK(r.warnings.notes.size() == 1);

    SimResult s = simulate_scheduled(t, schedule_asap(t),
                                     {{"a", fixed(2.0L)}, {"b", fx::FixedValue{0}}});
    CHECK(s.outputs.at("q").raw == INT32_MAX);
}

TEST_CASE("a three-output operator routes each result") {
    TreeArray t = load_design("local_osc");
    Vec in{{"theta", fixed(0.5235987755982988L)}}; // pi/6
    SimResult r = simulate_graph(t, in);
    CHECK(r.outputs.at("sin_o").raw == 0x00008000);
    CHECK(r.outputs.at("cos_o").raw == 0x0000DDB3);
    CHECK(simulate_scheduled(t, schedule_asap(t), in).outputs == r.outputs);
}

TEST_CASE("missing stimulus is an internal fault") {
    TreeArray t = build(R"(input_define("a", "b")
output_define("r")
Addition_V("r", "a", "b")
)");
    CHECK_THROWS_AS(simulate_graph(t, {{"a", fixed(1.0L)}}), InternalError);
}

TEST_CASE("library calls have no evaluation model") {
    namespace fsys = std::filesystem;
    fsys::path root = fsys::temp_directory_path() / "hlsgen_sim_lib";
    fsys::remove_all(root);
    fsys::create_directories(root);
    std::ofstream(root / "mac.v") << "module mac(input clk, input rst, input [31:0] x,\n"
                                     "           input [31:0] y, output [31:0] r);\nendmodule\n";
    hwlib::Library lib = hwlib::Library::open(root / "lib");
    hwlib::LibraryEntry e;
    e.label = "mac";
    e.verilog_file = "mac.v";
    e.inputs = {"x", "y"};
    e.outputs = {"r"};
    lib.register_module(e, root / "mac.v");

    SourceProgram p = parse_source(R"(input_define("a", "b")
output_define("out")
Call_V("mac", "m", "a", "b")
Value_V("out", "m")
)",
                                   "t");
    ElabOptions opts;
    opts.library = &lib;
    ElabResult el = elaborate(p, opts);
    TreeArray t = build_tree(el.stmts, p, LatencyTable{}, &lib);
    pad_else_branch(t);
    insert_merges(t, LatencyTable{});
    CHECK_THROWS_AS(simulate_graph(t, {{"a", fixed(1.0L)}, {"b", fixed(1.0L)}}), SimUnsupported);

    std::error_code ec;
    fsys::remove_all(root, ec);
}

TEST_CASE("removing a delay chain surfaces as a replay fault, not a wrong value") {
    TreeArray t = build(R"(input_define("a", "b")
output_define("out")
Multiplication_V("m", "a", "a")
Addition_V("s", "m", "b")
Subtraction_V("out", "s", "m")
)");
    Schedule s = schedule_asap(t);
    REQUIRE(s.delays.size() == 2);
    Schedule broken = s;
    broken.delays.clear();
    CHECK_THROWS_AS(simulate_scheduled(t, broken, {{"a", fixed(1.0L)}, {"b", fixed(1.0L)}}),
                    InternalError);
    // with only the input-side chain missing it still faults
    broken = s;
    broken.delays.erase(broken.delays.begin());
    CHECK_THROWS_AS(simulate_scheduled(t, broken, {{"a", fixed(1.0L)}, {"b", fixed(1.0L)}}),
                    InternalError);
}

TEST_CASE("scheduled replay equals functional evaluation on every example") {
    const char* stems[] = {"mac16",      "fft32",     "demodulation", "modulation", "backprop",
                           "magnitude",  "gain_db",   "local_osc",    "saturate"};
    for (const char* stem : stems) {
        TreeArray t = load_design(stem);
        Schedule s = schedule_asap(t);
        SplitMix64 rng(0xC0FFEEULL);
        for (int v = 0; v < 25; ++v) {
            Vec in;
            for (const std::string& port : t.input_ports)
                in[port] = draw_fixed(rng, -100 * 65536, 100 * 65536);
            SimResult g = simulate_graph(t, in);
            SimResult r = simulate_scheduled(t, s, in);
            CHECK_MESSAGE(g.outputs == r.outputs, stem << " vector " << v);
        }
    }
}

TEST_CASE("scheduled replay equality holds under random latency tables") {
    std::mt19937 seq(98765u);
    const char* ops[] = {"Addition_V", "Subtraction_V", "Multiplication_V", "Division_V"};
    for (int iter = 0; iter < 50; ++iter) {
        int count = 3 + static_cast<int>(seq() % 20);
        std::string src = "input_define(\"a\", \"b\")\noutput_define(\"out\")\n";
        std::vector<std::string> names = {"a", "b"};
        for (int i = 0; i < count; ++i) {
            std::string v = "v" + std::to_string(i);
            src += std::string(ops[seq() % 4]) + "(\"" + v + "\", \"" + names[seq() % names.size()] +
                   "\", \"" + names[seq() % names.size()] + "\")\n";
            names.push_back(v);
        }
        src += "Value_V(\"out\", \"" + names.back() + "\")\n";
        LatencyTable lat;
        lat.cycles["add"] = 1 + static_cast<int>(seq() % 3);
        lat.cycles["mul"] = 1 + static_cast<int>(seq() % 5);
        lat.cycles["div"] = 1 + static_cast<int>(seq() % 7);

        TreeArray t = build(src, "fuzz", lat);
        Schedule s = schedule_asap(t);
        SplitMix64 rng(iter + 1);
        for (int v = 0; v < 5; ++v) {
            Vec in{{"a", draw_fixed(rng, -50 * 65536, 50 * 65536)},
                   {"b", draw_fixed(rng, -50 * 65536, 50 * 65536)}};
            CHECK(simulate_graph(t, in).outputs == simulate_scheduled(t, s, in).outputs);
        }
    }
}

TEST_CASE("outputs touched by sine or logarithm carry the approx tag") {
    CHECK(approx_outputs(load_design("gain_db")) == std::set<std::string>{"db"});
    CHECK(approx_outputs(load_design("local_osc")) == std::set<std::string>{"sin_o", "cos_o"});
    // exact cones: sqrt and power are bit-exact operators
    CHECK(approx_outputs(load_design("magnitude")).empty());
    // sine folded away at elaboration leaves an exact datapath
    CHECK(approx_outputs(load_design("demodulation")).empty());
    CHECK(approx_outputs(load_design("modulation")).empty());
    CHECK(approx_outputs(load_design("mac16")).empty());
}

TEST_CASE("the approx tag flows through merges") {
    TreeArray t = build(R"(input_define("x")
output_define("r")
If_V("x", number_to_hex(0), ">"):
    Logarithm_V("v", number_to_hex(2), "x")
Else_V():
    Value_V("v", "x")
Value_V("r", "v")
)");
    CHECK(approx_outputs(t) == std::set<std::string>{"r"});
}
