// End-to-end command-line behavior: subcommands, artifact sets, the
// printed simulation transcript, exit codes, and build determinism.
// Text-facing checks run the installed binary; exit-code checks also
// exercise run_cli in process.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "hlsgen/driver.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// runs the real binary through the shell, capturing both streams
RunResult run(const std::string& args) {
    static int seq = 0;
    fs::path outp = fs::temp_directory_path() /
                    ("hlsgen_drv_out_" + std::to_string(::getpid()) + "_" + std::to_string(seq));
    fs::path errp = fs::temp_directory_path() /
                    ("hlsgen_drv_err_" + std::to_string(::getpid()) + "_" + std::to_string(seq));
    ++seq;
    std::string cmd = std::string(HLSGEN_BIN) + " " + args + " >" + outp.string() + " 2>" +
                      errp.string();
    int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(outp);
    r.err = slurp(errp);
    fs::remove(outp);
    fs::remove(errp);
    return r;
}

int cli(std::initializer_list<const char*> args) {
    std::vector<const char*> argv{"hlsgen"};
    argv.insert(argv.end(), args.begin(), args.end());
    return hlsgen::run_cli(static_cast<int>(argv.size()), argv.data());
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() /
               ("hlsgen_drv_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

fs::path write(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
    return p;
}

const char* tiny_src = R"(input_define("a", "b")
output_define("out")
Multiplication_V("m", "a", "a")
Addition_V("s", "m", "b")
Subtraction_V("out", "s", "m")
)";

std::string corpus(const std::string& stem) {
    return std::string(CORPUS_DIR) + "/" + stem + ".vpy";
}

std::string golden(const std::string& rel) {
    return slurp(fs::path(GOLDEN_DIR) / rel);
}

} // namespace

TEST_CASE("usage problems exit 1 before any work happens") {
    TempDir t("usage");
    fs::path src = write(t.path / "d.vpy", tiny_src);
    CHECK(run("").exit_code == 1);
    CHECK(run("frobnicate").exit_code == 1);
    CHECK(run("build").exit_code == 1);
    CHECK(run("build " + src.string()).exit_code == 1); // --out is required
    CHECK(run("simulate " + src.string() + " --range nope").exit_code == 1);
    CHECK(run("simulate " + src.string() + " --range 4:-4").exit_code == 1);
    CHECK(run("build " + src.string() + " -o " + t.str() + "/o --set mul.zzz=1").exit_code == 1);

    // the same paths through the in-process entry point
    CHECK(cli({}) == 1);
    CHECK(cli({"frobnicate"}) == 1);
    CHECK(cli({"build", src.string().c_str()}) == 1);
}

TEST_CASE("a build writes the full artifact set") {
    TempDir t("artifacts");
    fs::path src = write(t.path / "tiny.vpy", tiny_src);
    fs::path out = t.path / "out";
    RunResult r = run("build " + src.string() + " -o " + out.string());
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("design tiny: 3 nodes, 3 cycles (unrolled)") != std::string::npos);
    CHECK(r.out.find("wrote " + (out / "top.v").string()) != std::string::npos);

    CHECK(fs::exists(out / "top.v"));
    CHECK(fs::exists(out / "tb_top.v"));
    CHECK(fs::exists(out / "report.txt"));
    const char* lib_files[] = {"Addition_V.v",  "Subtraction_V.v", "Multiplication_V.v",
                               "Division_V.v",  "Power_V.v",       "Sqrt_V.v",
                               "SinCosTan_V.v", "Logarithm_V.v",   "Value_V.v",
                               "Compare_V.v",   "Merge_V.v",       "Delay_V.v"};
    for (const char* f : lib_files)
        CHECK_MESSAGE(fs::exists(out / "lib" / f), f);

    // --no-report suppresses exactly the report
    fs::path out2 = t.path / "out2";
    REQUIRE(run("build " + src.string() + " -o " + out2.string() + " --no-report").exit_code == 0);
    CHECK(!fs::exists(out2 / "report.txt"));
    CHECK(fs::exists(out2 / "top.v"));

    // pipelined is announced in the banner
    fs::path out3 = t.path / "out3";
    RunResult rp = run("build " + src.string() + " -o " + out3.string() + " --pipelined");
    REQUIRE(rp.exit_code == 0);
    CHECK(rp.out.find("design tiny: 3 nodes, 3 cycles (pipelined)") != std::string::npos);
}

TEST_CASE("reports reach disk exactly as the estimator prints them") {
    TempDir t("reports");
    fs::path out = t.path / "u";
    REQUIRE(run("build " + corpus("mac16") + " -o " + out.string()).exit_code == 0);
    CHECK(slurp(out / "report.txt") == golden("reports/mac16_unrolled.txt"));

    fs::path outp = t.path / "p";
    REQUIRE(run("build " + corpus("demodulation") + " -o " + outp.string() + " --pipelined")
                .exit_code == 0);
    CHECK(slurp(outp / "report.txt") == golden("reports/demodulation_pipelined.txt"));

    // estimate prints the same table without touching the filesystem
    RunResult r = run("estimate " + corpus("mac16"));
    CHECK(r.exit_code == 0);
    CHECK(r.out == golden("reports/mac16_unrolled.txt"));
}

TEST_CASE("the operator table and schedule dumps match their goldens") {
    TempDir t("dumps");
    fs::path out = t.path / "o";
    RunResult ir = run("build " + corpus("mac16") + " -o " + out.string() +
                       " --no-report --dump-ir");
    REQUIRE(ir.exit_code == 0);
    CHECK(ir.out.find(golden("dumps/mac16_ir.txt")) != std::string::npos);

    fs::path out2 = t.path / "o2";
    RunResult sc = run("build " + corpus("mac16") + " -o " + out2.string() +
                       " --no-report --pipelined --dump-schedule");
    REQUIRE(sc.exit_code == 0);
    CHECK(sc.out.find(golden("dumps/mac16_schedule.txt")) != std::string::npos);
}

TEST_CASE("the simulation transcript is frozen") {
    TempDir t("sim");
    fs::path src = write(t.path / "tiny.vpy", tiny_src);
    RunResult r = run("simulate " + src.string() + " --vectors 2");
    CHECK(r.exit_code == 0);
    CHECK(r.out == R"(vector 0:
  in  a = 0xFFFC9E56 (-3.381500)
  in  b = 0xFFFBC190 (-4.243896)
  out out = 0xFFFBC190 (-4.243896)
vector 1:
  in  a = 0x0003F93F (3.973618)
  in  b = 0x00037BA7 (3.483017)
  out out = 0x00037BA7 (3.483017)
simulated 2 vectors
)");
}

TEST_CASE("domain faults are reported per vector and fail the run") {
    TempDir t("fault");
    fs::path src = write(t.path / "root.vpy",
                         "input_define(\"x\")\noutput_define(\"r\")\nSqrt_V(\"r\", \"x\")\n");
    RunResult r = run("simulate " + src.string() + " --vectors 4 --range -4:4 --seed 3");
    CHECK(r.exit_code == 2);
    CHECK(r.out.find("fault: sqrt of negative value 0xFFFD20D2") != std::string::npos);
    CHECK(r.out.find("simulated 4 vectors, 1 faulted") != std::string::npos);
    // vectors after the faulting one still run
    CHECK(r.out.find("out r = 0x0001B900 (1.722656)") != std::string::npos);

    // an all-positive range clears it
    RunResult ok = run("simulate " + src.string() + " --vectors 4 --range 0:4 --seed 3");
    CHECK(ok.exit_code == 0);
    CHECK(ok.out.find("faulted") == std::string::npos);
}

TEST_CASE("explicit stimulus files drive both simulate and the bench") {
    TempDir t("stim");
    fs::path src = write(t.path / "tiny.vpy", tiny_src);
    fs::path stim = write(t.path / "vecs.txt", "# two vectors\n1.0 2.0\n0x00008000 -1.5\n");

    RunResult r = run("simulate " + src.string() + " --stim " + stim.string());
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("in  a = 0x00010000 (1.000000)") != std::string::npos);
    CHECK(r.out.find("out out = 0x00020000 (2.000000)") != std::string::npos);
    CHECK(r.out.find("in  a = 0x00008000 (0.500000)") != std::string::npos);
    CHECK(r.out.find("out out = 0xFFFE8000 (-1.500000)") != std::string::npos);
    CHECK(r.out.find("simulated 2 vectors") != std::string::npos);

    fs::path out = t.path / "o";
    REQUIRE(run("build " + src.string() + " -o " + out.string() + " --stim " + stim.string() +
                " --no-report")
                .exit_code == 0);
    std::string tb = slurp(out / "tb_top.v");
    CHECK(tb.find("a = 32'h00010000;") != std::string::npos);
    CHECK(tb.find("b = 32'h00020000;") != std::string::npos);
    CHECK(tb.find("want 32'h00020000") != std::string::npos);
    CHECK(tb.find("ALL PASS (2 vectors)") != std::string::npos);

    // a malformed stimulus value is a source-level error
    fs::path bad = write(t.path / "bad.txt", "1.0 banana\n");
    RunResult rb = run("simulate " + src.string() + " --stim " + bad.string());
    CHECK(rb.exit_code == 2);
    CHECK(rb.err.find("bad stimulus value 'banana'") != std::string::npos);
}

TEST_CASE("source diagnostics exit 2 with their code on stderr") {
    TempDir t("diags");
    CHECK(run("build /definitely/not/here.vpy -o " + t.str() + "/o").exit_code == 2);

    struct Case {
        const char* body;
        const char* code;
    } cases[] = {
        {"input_define(\"a\")\noutput_define(\"r\")\nBogus_V(\"r\", \"a\")\n", "error[VP008]"},
        {"input_define(\"a\")\noutput_define(\"r\")\nAddition_V(\"r\", \"a\", 5)\n",
         "error[VP007]"},
        {"input_define(\"a\")\noutput_define(\"r\")\nAddition_V(\"r\", \"nope\", \"a\")\n",
         "error[VP005]"},
        {"input_define(\"clk\")\noutput_define(\"r\")\nValue_V(\"r\", \"clk\")\n",
         "error[VP001]"},
        {"input_define(\"a\")\noutput_define(\"r\")\n"
         "Addition_V(\"r\", \"a\", \"a\")\nAddition_V(\"r\", \"r\", \"r\")\n",
         "error[VP006]"},
    };
    int i = 0;
    for (const Case& c : cases) {
        fs::path src = write(t.path / ("c" + std::to_string(i++) + ".vpy"), c.body);
        RunResult r = run("build " + src.string() + " -o " + t.str() + "/o" + std::to_string(i));
        CHECK_MESSAGE(r.exit_code == 2, c.code);
        CHECK_MESSAGE(r.err.find(c.code) != std::string::npos, c.code << " got: " << r.err);
    }
}

TEST_CASE("the library round-trips through the command line") {
    TempDir t("lib");
    fs::path mod = write(t.path / "mymac.v", "module mymac;\nendmodule\n");
    std::string lib = (t.path / "lib").string();

    RunResult add = run("lib add mymac " + mod.string() + " --lib " + lib +
                        " --inputs x,y --outputs r --cycles 3 --lut 150 --ff 64 --dsp 1");
    CHECK(add.exit_code == 0);
    CHECK(add.out.find("registered 'mymac' (3 cycles, 2 in, 1 out) in " + lib) !=
          std::string::npos);

    RunResult list = run("lib list --lib " + lib);
    CHECK(list.exit_code == 0);
    CHECK(list.out == "library " + lib + ": 1 module\n" +
                          "mymac: cycles=3 in=x,y out=r lut=150 ff=64 dsp=1 bram=0 "
                          "file=mymac.v\n");

    // duplicate labels are an input error unless forced
    CHECK(run("lib add mymac " + mod.string() + " --lib " + lib +
              " --inputs x,y --outputs r")
              .exit_code == 2);
    CHECK(run("lib add mymac " + mod.string() + " --lib " + lib +
              " --inputs x,y --outputs r --cycles 5 --force")
              .exit_code == 0);
    RunResult list2 = run("lib list --lib " + lib);
    CHECK(list2.out.find("cycles=5") != std::string::npos);

    // an empty or missing library lists zero modules
    RunResult empty = run("lib list --lib " + t.str() + "/none");
    CHECK(empty.exit_code == 0);
    CHECK(empty.out == "library " + t.str() + "/none: 0 modules\n");
}

TEST_CASE("a corrupt manifest is an internal-class failure, exit 3") {
    TempDir t("corrupt");
    fs::create_directories(t.path / "lib");
    write(t.path / "lib" / "manifest.json", "{ not json");
    RunResult r = run("lib list --lib " + (t.path / "lib").string());
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("manifest.json") != std::string::npos);
}

TEST_CASE("a design calling a library module builds and ships its source") {
    TempDir t("call");
    fs::path mod = write(t.path / "mymac.v", "module mymac;\nendmodule\n");
    std::string lib = (t.path / "lib").string();
    REQUIRE(run("lib add mymac " + mod.string() + " --lib " + lib +
                " --inputs x,y --outputs r --cycles 3")
                .exit_code == 0);

    fs::path src = write(t.path / "calld.vpy",
                         "input_define(\"p\",\"q\")\noutput_define(\"r\")\n"
                         "Call_V(\"mymac\", \"r\", \"p\", \"q\")\n");
    fs::path out = t.path / "out";
    RunResult r = run("build " + src.string() + " -o " + out.string() + " --lib " + lib +
                      " --no-report");
    REQUIRE(r.exit_code == 0);
    CHECK(r.err.find("library call 'mymac' has no built-in evaluation model; "
                     "generating a stimulus-only testbench") != std::string::npos);
    CHECK(fs::exists(out / "lib" / "mymac.v"));
    std::string top = slurp(out / "top.v");
    CHECK(top.find("mymac u_call_0 (.clk(clk), .rst(rst), .x(p), .y(q), .r(r));") !=
          std::string::npos);
    std::string tb = slurp(out / "tb_top.v");
    CHECK(tb.find("stimulus-only run complete") != std::string::npos);

    // without the library the call site is an input error
    RunResult r2 = run("build " + src.string() + " -o " + out.string() + "2 --no-report");
    CHECK(r2.exit_code == 2);
    CHECK(r2.err.find("error[VP011]") != std::string::npos);
}

TEST_CASE("two builds of the same design are byte-identical") {
    TempDir t("repro");
    for (const char* stem : {"fft32", "saturate"}) {
        fs::path o1 = t.path / (std::string(stem) + "_1");
        fs::path o2 = t.path / (std::string(stem) + "_2");
        REQUIRE(run("build " + corpus(stem) + " -o " + o1.string() + " --pipelined")
                    .exit_code == 0);
        REQUIRE(run("build " + corpus(stem) + " -o " + o2.string() + " --pipelined")
                    .exit_code == 0);

        std::vector<fs::path> rels;
        for (const auto& entry : fs::recursive_directory_iterator(o1))
            if (entry.is_regular_file())
                rels.push_back(fs::relative(entry.path(), o1));
        CHECK(rels.size() >= 15); // top, tb, report, 12 catalog files
        for (const fs::path& rel : rels) {
            REQUIRE_MESSAGE(fs::exists(o2 / rel), rel.string());
            CHECK_MESSAGE(slurp(o1 / rel) == slurp(o2 / rel), stem << "/" << rel.string());
        }
        size_t count2 = 0;
        for (const auto& entry : fs::recursive_directory_iterator(o2))
            if (entry.is_regular_file())
                ++count2;
        CHECK(rels.size() == count2);
    }
}
