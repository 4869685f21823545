#include "hlsgen/codegen.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <set>

#include "hlsgen/diagnostics.hpp"

namespace hlsgen {

// ---------------------------------------------------------------------------
// Fixed hardware function catalog
// ---------------------------------------------------------------------------
// Every datapath module is clocked, resets to zero, and registers its result
// once per cycle.  Data is Q16.16 in signed [31:0]; comparison results are
// single bits.

namespace {

const char* kAdditionV = R"(// 32-bit Q16.16 adder, wraparound semantics
module Addition_V (
  input  wire clk,
  input  wire rst,
  input  wire signed [31:0] a,
  input  wire signed [31:0] b,
  output reg  signed [31:0] r
);
  always @(posedge clk) begin
    if (rst) r <= 32'sd0;
    else     r <= a + b;
  end
endmodule
)";

const char* kSubtractionV = R"(// 32-bit Q16.16 subtractor, wraparound semantics
module Subtraction_V (
  input  wire clk,
  input  wire rst,
  input  wire signed [31:0] a,
  input  wire signed [31:0] b,
  output reg  signed [31:0] r
);
  always @(posedge clk) begin
    if (rst) r <= 32'sd0;
    else     r <= a - b;
  end
endmodule
)";

const char* kMultiplicationV = R"(// Q16.16 multiplier: full 64-bit product, bits [47:16] kept
module Multiplication_V (
  input  wire clk,
  input  wire rst,
  input  wire signed [31:0] a,
  input  wire signed [31:0] b,
  output reg  signed [31:0] r
);
  wire signed [63:0] p = a * b;
  always @(posedge clk) begin
    if (rst) r <= 32'sd0;
    else     r <= p[47:16];
  end
endmodule
)";

const char* kDivisionV = R"(// Q16.16 divider: (a << 16) / b truncated toward zero; division by zero
// saturates to the signed rail of the dividend
module Division_V (
  input  wire clk,
  input  wire rst,
  input  wire signed [31:0] a,
  input  wire signed [31:0] b,
  output reg  signed [31:0] r
);
  wire signed [47:0] num = $signed({a, 16'h0000});
  wire signed [47:0] den = {{16{b[31]}}, b};
  wire signed [47:0] q   = num / den;
  always @(posedge clk) begin
    if (rst)             r <= 32'sd0;
    else if (b == 32'sd0) r <= a[31] ? 32'sh80000000 : 32'sh7FFFFFFF;
    else                 r <= q[31:0];
  end
endmodule
)";

const char* kPowerV = R"(// Q16.16 integer power by square-and-multiply in Q32.32.  The exponent
// port carries a compile-time constant in [-128, 127]; negative exponents
// invert the positive power, and an exact-zero intermediate saturates to
// the signed rail of the base.
module Power_V (
  input  wire clk,
  input  wire rst,
  input  wire signed [31:0] a,
  input  wire signed [7:0]  e,
  output reg  signed [31:0] r
);
  reg [7:0] mag;
  reg signed [63:0]  acc;
  reg signed [63:0]  base;
  reg signed [127:0] t;
  reg signed [127:0] inv;
  integer i;
  always @* begin
    mag  = e[7] ? (~e + 8'd1) : e;
    acc  = 64'sh0000000100000000;            // 1.0 in Q32.32
    base = {{16{a[31]}}, a, 16'h0000};       // a in Q32.32
    for (i = 0; i < 8; i = i + 1) begin
      if (mag[i]) begin
        t   = acc * base;
        acc = t[95:32];
      end
      t    = base * base;
      base = t[95:32];
    end
    inv = 128'sd0;
    if (e[7] && acc != 64'sd0) begin
      inv = 128'sh00000000000000010000000000000000 / {{64{acc[63]}}, acc};
      acc = inv[63:0];
    end
  end
  always @(posedge clk) begin
    if (rst)                        r <= 32'sd0;
    else if (e[7] && acc == 64'sd0) r <= a[31] ? 32'sh80000000 : 32'sh7FFFFFFF;
    else                            r <= acc[47:16];
  end
endmodule
)";

const char* kSqrtV = R"(// Q16.16 square root: restoring integer square root of the raw bits
// (exactly floor(sqrt(raw))), which lands in Q8.8 and shifts up to Q16.16.
// Negative inputs are a domain error and produce unspecified output.
module Sqrt_V (
  input  wire clk,
  input  wire rst,
  input  wire signed [31:0] a,
  output reg  signed [31:0] r
);
  reg [31:0] num;
  reg [31:0] res;
  reg [31:0] bitv;
  integer i;
  always @* begin
    num  = a;
    res  = 32'd0;
    bitv = 32'h40000000;
    for (i = 0; i < 16; i = i + 1) begin
      if (num >= res + bitv) begin
        num = num - (res + bitv);
        res = (res >> 1) + bitv;
      end else begin
        res = res >> 1;
      end
      bitv = bitv >> 2;
    end
  end
  always @(posedge clk) begin
    if (rst) r <= 32'sd0;
    else     r <= res << 8;
  end
endmodule
)";

const char* kSinCosTanV = R"(// Q16.16 sine/cosine/tangent: reduce the angle to [-pi/2, pi/2] with a
// half-turn flag, then run 24 unrolled CORDIC rotations in Q3.29.  Tangent
// is the Q3.29 ratio sin/cos (truncated, wrapping), so values near the
// poles wrap exactly like the reference arithmetic.  Angles beyond about
// +/-100 rad exceed the unrolled range reduction and lose accuracy.
module SinCosTan_V (
  input  wire clk,
  input  wire rst,
  input  wire signed [31:0] a,
  output reg  signed [31:0] s,
  output reg  signed [31:0] c,
  output reg  signed [31:0] t
);
  function signed [31:0] cordic_atan;
    input integer idx;
    begin
      case (idx)
        0:  cordic_atan = 32'sd421657428;
        1:  cordic_atan = 32'sd248918915;
        2:  cordic_atan = 32'sd131521918;
        3:  cordic_atan = 32'sd66762579;
        4:  cordic_atan = 32'sd33510843;
        5:  cordic_atan = 32'sd16771758;
        6:  cordic_atan = 32'sd8387925;
        7:  cordic_atan = 32'sd4194219;
        8:  cordic_atan = 32'sd2097141;
        9:  cordic_atan = 32'sd1048575;
        10: cordic_atan = 32'sd524288;
        11: cordic_atan = 32'sd262144;
        12: cordic_atan = 32'sd131072;
        13: cordic_atan = 32'sd65536;
        14: cordic_atan = 32'sd32768;
        15: cordic_atan = 32'sd16384;
        16: cordic_atan = 32'sd8192;
        17: cordic_atan = 32'sd4096;
        18: cordic_atan = 32'sd2048;
        19: cordic_atan = 32'sd1024;
        20: cordic_atan = 32'sd512;
        21: cordic_atan = 32'sd256;
        22: cordic_atan = 32'sd128;
        default: cordic_atan = 32'sd64;
      endcase
    end
  endfunction

  reg signed [31:0] ang;   // Q16.16 radians
  reg               half;  // rotated by pi: negate both outputs
  reg signed [31:0] x, y, z, nx, ny;  // Q3.29
  reg signed [63:0] tq;
  reg signed [63:0] tdiv;
  reg signed [31:0] tw;
  integer i;
  always @* begin
    ang = a;
    for (i = 0; i < 16; i = i + 1) begin
      if (ang > 32'sd205887)       ang = ang - 32'sd411775;  // > pi: -2pi
      else if (ang < -32'sd205887) ang = ang + 32'sd411775;  // < -pi: +2pi
    end
    half = 1'b0;
    if (ang > 32'sd102944) begin        // > pi/2: rotate by -pi
      ang  = ang - 32'sd205887;
      half = 1'b1;
    end else if (ang < -32'sd102944) begin
      ang  = ang + 32'sd205887;
      half = 1'b1;
    end
    x = 32'sd326016437;                 // CORDIC gain compensation
    y = 32'sd0;
    z = ang <<< 13;                     // Q16.16 -> Q3.29
    for (i = 0; i < 24; i = i + 1) begin
      if (z >= 32'sd0) begin
        nx = x - (y >>> i);
        ny = y + (x >>> i);
        z  = z - cordic_atan(i);
      end else begin
        nx = x + (y >>> i);
        ny = y - (x >>> i);
        z  = z + cordic_atan(i);
      end
      x = nx;
      y = ny;
    end
    if (half) begin
      x = -x;
      y = -y;
    end
    tq = y;
    tq = tq <<< 29;
    tdiv = (x == 32'sd0) ? 64'sd0 : tq / x;
    tw = tdiv[31:0];
  end
  always @(posedge clk) begin
    if (rst) begin
      s <= 32'sd0;
      c <= 32'sd0;
      t <= 32'sd0;
    end else begin
      s <= y >>> 13;
      c <= x >>> 13;
      t <= tw >>> 13;
    end
  end
endmodule
)";

const char* kLogarithmV = R"(// Q16.16 logarithm of b in base a: log2 by mantissa squaring (16 fraction
// bits), then the quotient of the two log2 values.  Exact whenever both
// log2 values are exactly representable (power-of-two bases and arguments);
// approximate otherwise.  Non-positive inputs and base 1.0 are domain
// errors with unspecified output.
module Logarithm_V (
  input  wire clk,
  input  wire rst,
  input  wire signed [31:0] a,
  input  wire signed [31:0] b,
  output reg  signed [31:0] r
);
  function signed [31:0] log2_q16;
    input [31:0] x;
    reg [63:0] y;
    reg [15:0] frac;
    reg found;
    integer m, j;
    begin
      m = 0;
      found = 1'b0;
      for (j = 31; j >= 0; j = j - 1) begin
        if (!found && x[j]) begin
          m = j;
          found = 1'b1;
        end
      end
      if (m >= 30) y = x >> (m - 30);
      else         y = x << (30 - m);
      frac = 16'd0;
      for (j = 15; j >= 0; j = j - 1) begin
        y = (y * y) >> 30;
        if (y >= 64'h0000000080000000) begin
          y = y >> 1;
          frac[j] = 1'b1;
        end
      end
      log2_q16 = ((m - 16) <<< 16) | {16'd0, frac};
    end
  endfunction

  wire signed [31:0] l2arg  = log2_q16(b);
  wire signed [31:0] l2base = log2_q16(a);
  wire signed [47:0] num    = $signed({l2arg, 16'h0000});
  wire signed [47:0] den    = {{16{l2base[31]}}, l2base};
  wire signed [47:0] q      = (l2base == 32'sd0) ? 48'sd0 : num / den;
  always @(posedge clk) begin
    if (rst) r <= 32'sd0;
    else     r <= q[31:0];
  end
endmodule
)";

const char* kValueV = R"(// registered pass-through
module Value_V (
  input  wire clk,
  input  wire rst,
  input  wire signed [31:0] a,
  output reg  signed [31:0] r
);
  always @(posedge clk) begin
    if (rst) r <= 32'sd0;
    else     r <= a;
  end
endmodule
)";

const char* kCompareV = R"(// signed comparison, one-bit registered result
// MODE: 0 '>'  1 '<'  2 '>='  3 '<='  4 '=='  5 '!='
module Compare_V #(
  parameter MODE = 0
) (
  input  wire clk,
  input  wire rst,
  input  wire signed [31:0] a,
  input  wire signed [31:0] b,
  output reg  r
);
  reg v;
  always @* begin
    case (MODE)
      0: v = (a > b);
      1: v = (a < b);
      2: v = (a >= b);
      3: v = (a <= b);
      4: v = (a == b);
      default: v = (a != b);
    endcase
  end
  always @(posedge clk) begin
    if (rst) r <= 1'b0;
    else     r <= v;
  end
endmodule
)";

const char* kMergeV = R"(// two-to-one select: the condition bit picks the if-branch value
module Merge_V (
  input  wire clk,
  input  wire rst,
  input  wire signed [31:0] a,   // if-branch value
  input  wire signed [31:0] b,   // else-branch value
  input  wire c,                 // condition
  output reg  signed [31:0] r
);
  always @(posedge clk) begin
    if (rst) r <= 32'sd0;
    else     r <= c ? a : b;
  end
endmodule
)";

const char* kDelayV = R"(// pipeline balancing shift register
module Delay_V #(
  parameter STAGES = 1,
  parameter WIDTH  = 32
) (
  input  wire clk,
  input  wire rst,
  input  wire [WIDTH-1:0] d,
  output wire [WIDTH-1:0] q
);
  reg [WIDTH-1:0] stage [0:STAGES-1];
  integer i;
  always @(posedge clk) begin
    if (rst) begin
      for (i = 0; i < STAGES; i = i + 1) stage[i] <= {WIDTH{1'b0}};
    end else begin
      stage[0] <= d;
      for (i = 1; i < STAGES; i = i + 1) stage[i] <= stage[i-1];
    end
  end
  assign q = stage[STAGES-1];
endmodule
)";

} // namespace

std::vector<GeneratedFile> function_library_files() {
    return {
        {"Addition_V.v", kAdditionV},
        {"Subtraction_V.v", kSubtractionV},
        {"Multiplication_V.v", kMultiplicationV},
        {"Division_V.v", kDivisionV},
        {"Power_V.v", kPowerV},
        {"Sqrt_V.v", kSqrtV},
        {"SinCosTan_V.v", kSinCosTanV},
        {"Logarithm_V.v", kLogarithmV},
        {"Value_V.v", kValueV},
        {"Compare_V.v", kCompareV},
        {"Merge_V.v", kMergeV},
        {"Delay_V.v", kDelayV},
    };
}

std::string op_instance_prefix(OpKind k) {
    switch (k) {
    case OpKind::Add: return "add";
    case OpKind::Sub: return "sub";
    case OpKind::Mul: return "mul";
    case OpKind::Div: return "div";
    case OpKind::Power: return "pow";
    case OpKind::Log: return "log";
    case OpKind::Sqrt: return "sqrt";
    case OpKind::SinCosTan: return "sct";
    case OpKind::Value: return "val";
    case OpKind::IfCompare: return "cmp";
    case OpKind::Merge: return "mrg";
    case OpKind::Call: return "call";
    case OpKind::Unknown: break;
    }
    return "op";
}

// ---------------------------------------------------------------------------
// Design emission
// ---------------------------------------------------------------------------

namespace {

std::string hex32(fx::FixedValue v) { return "32'h" + fx::to_hex(v).substr(2); }

std::string hex8(int32_t raw) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "8'h%02X", static_cast<unsigned>(raw >> 16) & 0xFFu);
    return buf;
}

struct NamePool {
    std::set<std::string> used;
    void reserve(const std::string& n) { used.insert(n); }
    std::string claim(std::string cand) {
        while (used.count(cand)) cand += "_x";
        used.insert(cand);
        return cand;
    }
};

struct ScopeData {
    NamePool pool;
    // imported parent nets, in discovery order: local port -> parent net
    std::vector<std::pair<std::string, std::string>> imports;
    std::map<std::string, std::string> import_port_by_parent_net;
    std::string wires; // declarations
    std::string body;  // instances
};

class Emitter {
  public:
    Emitter(const TreeArray& tree, const Schedule& sched, const CodegenOptions& opt)
        : tree_(tree), sched_(sched), opt_(opt), bt_(parse_blocks(tree)) {}

    std::vector<GeneratedFile> run();

  private:
    const TreeArray& tree_;
    const Schedule& sched_;
    const CodegenOptions& opt_;
    BlockTree bt_;

    std::vector<int> scope_of_;                    // node addr -> scope id (-1 top)
    std::map<int, int> parent_scope_;              // block id -> parent scope id
    std::map<int, int> block_index_;               // block id -> index in bt_
    std::map<int, ScopeData> scopes_;              // by scope id
    std::vector<std::vector<std::string>> wires_;  // addr -> per-result wire
    std::map<std::array<int, 3>, const DelayElement*> chains_;
    std::map<std::array<int, 3>, std::string> delay_nets_;
    // per block: merged name -> (if net, else net) in the parent scope
    std::map<int, std::map<std::string, std::pair<std::string, std::string>>> pair_nets_;
    std::map<int, std::string> cond_net_; // parent net carrying cond_r
    std::vector<GeneratedFile> block_files_;

    void compute_scopes();
    void name_wires();
    void collect_imports();
    int result_idx(int addr, const std::string& name) const;
    std::string local_net(int scope, int addr, int ri);
    std::string local_input_net(int scope, const std::string& port);
    std::string operand_net(int scope, int addr, int k, int half);
    std::string operand_conn(int scope, int addr, int k, int half);
    void declare_wire(int scope, const std::string& name, int width);
    void emit_node(int scope, int addr);
    void emit_delays(int scope, int addr);
    void emit_block(int parent_scope, const BlockTree::Block& b);
    void emit_items(int scope, const std::vector<BlockTree::Item>& items);
    std::string top_module();
};

void Emitter::compute_scopes() {
    scope_of_.assign(tree_.nodes.size(), -1);
    for (size_t bi = 0; bi < bt_.blocks.size(); ++bi)
        block_index_[bt_.blocks[bi].id] = static_cast<int>(bi);
    for (const TreeNode& n : tree_.nodes) {
        int s = n.blocks.empty() ? -1 : n.blocks.back().block_id;
        // a block's comparison lives inside the block module it opens
        if (n.cond_block >= 0) {
            parent_scope_[n.cond_block] = s;
            s = n.cond_block;
        }
        scope_of_[n.address] = s;
    }
    scopes_[-1]; // ensure the top scope exists
    for (const auto& [id, parent] : parent_scope_) {
        (void)parent;
        scopes_[id];
    }
}

void Emitter::name_wires() {
    NamePool& top = scopes_[-1].pool;
    for (const char* r : {"clk", "rst", "start", "busy", "valid", "count_r", "busy_r"})
        top.reserve(r);
    for (const std::string& p : tree_.input_ports) top.reserve(p);
    std::set<std::string> out_ports(tree_.output_ports.begin(), tree_.output_ports.end());
    for (const std::string& p : tree_.output_ports) top.reserve(p);
    for (auto& [id, sd] : scopes_) {
        if (id == -1) continue;
        sd.pool.reserve("clk");
        sd.pool.reserve("rst");
    }

    // total assignments per (scope, name), for the final-assignment rule
    std::map<std::pair<int, std::string>, int> totals, seen;
    for (const TreeNode& n : tree_.nodes)
        for (const std::string& r : n.results)
            totals[{scope_of_[n.address], r}] += 1;

    wires_.assign(tree_.nodes.size(), {});
    for (const TreeNode& n : tree_.nodes) {
        int s = scope_of_[n.address];
        for (const std::string& r : n.results) {
            int k = seen[{s, r}]++;
            std::string w;
            if (s == -1 && out_ports.count(r)) {
                // the last assignment drives the port; earlier ones version up
                if (k == totals[{s, r}] - 1)
                    w = r; // reserved upfront, used exactly once
                else
                    w = scopes_[s].pool.claim(r + "_v" + std::to_string(k + 1));
            } else {
                w = scopes_[s].pool.claim(k == 0 ? r : r + "_v" + std::to_string(k));
            }
            wires_[n.address].push_back(w);
        }
    }
}

int Emitter::result_idx(int addr, const std::string& name) const {
    const TreeNode& p = tree_.nodes[addr];
    for (size_t i = 0; i < p.results.size(); ++i)
        if (p.results[i] == name) return static_cast<int>(i);
    throw InternalError("node " + std::to_string(addr) + " has no result '" + name + "'");
}

std::string Emitter::local_net(int scope, int addr, int ri) {
    int s = scope_of_[addr];
    if (s == scope) return wires_[addr][ri];
    if (scope == -1)
        throw InternalError("producer of node " + std::to_string(addr) +
                            " is not visible from the top scope");
    std::string parent = local_net(parent_scope_.at(scope), addr, ri);
    ScopeData& sd = scopes_[scope];
    auto it = sd.import_port_by_parent_net.find(parent);
    if (it != sd.import_port_by_parent_net.end()) return it->second;
    std::string port = sd.pool.claim(parent);
    sd.imports.emplace_back(port, parent);
    sd.import_port_by_parent_net[parent] = port;
    return port;
}

std::string Emitter::local_input_net(int scope, const std::string& port) {
    if (scope == -1) return port;
    std::string parent = local_input_net(parent_scope_.at(scope), port);
    ScopeData& sd = scopes_[scope];
    auto it = sd.import_port_by_parent_net.find(parent);
    if (it != sd.import_port_by_parent_net.end()) return it->second;
    std::string local = sd.pool.claim(parent);
    sd.imports.emplace_back(local, parent);
    sd.import_port_by_parent_net[parent] = local;
    return local;
}

void Emitter::collect_imports() {
    for (const TreeNode& n : tree_.nodes) {
        if (n.op == OpKind::Merge) continue; // reads block exports in its own scope
        int scope = scope_of_[n.address];
        for (size_t k = 0; k < n.operands.size(); ++k) {
            const OperandRef& op = n.operands[k];
            if (op.kind != OperandRef::Kind::Name) continue;
            const PrevAddr& p = n.prev[k];
            if (p.is_pair())
                throw InternalError("branch pair on a non-merge operand at node " +
                                    std::to_string(n.address));
            if (p.first < 0)
                local_input_net(scope, op.name);
            else
                local_net(scope, p.first, result_idx(p.first, op.name));
        }
    }
}

// The source net feeding edge (addr, operand k, half), before any delay.
std::string Emitter::operand_net(int scope, int addr, int k, int half) {
    const TreeNode& n = tree_.nodes[addr];
    const OperandRef& op = n.operands[k];
    if (n.op == OpKind::Merge && k == 0) {
        const auto& nets = pair_nets_.at(n.merge_block).at(op.name);
        return half == 0 ? nets.first : nets.second;
    }
    if (n.op == OpKind::Merge && k == 1) return cond_net_.at(n.merge_block);
    const PrevAddr& p = n.prev[k];
    if (p.first < 0) return local_input_net(scope, op.name);
    return local_net(scope, p.first, result_idx(p.first, op.name));
}

void Emitter::declare_wire(int scope, const std::string& name, int width) {
    ScopeData& sd = scopes_[scope];
    if (width == 1)
        sd.wires += "  wire " + name + ";\n";
    else
        sd.wires += "  wire signed [31:0] " + name + ";\n";
}

// Emit the delay chains feeding node `addr` (pipelined mode only) and
// remember their output nets.
void Emitter::emit_delays(int scope, int addr) {
    const TreeNode& n = tree_.nodes[addr];
    for (size_t k = 0; k < n.operands.size(); ++k) {
        for (int half : {-1, 0, 1}) {
            auto it = chains_.find({addr, static_cast<int>(k), half});
            if (it == chains_.end()) continue;
            const DelayElement& d = *it->second;
            std::string src = operand_net(scope, addr, static_cast<int>(k), half);
            std::string suffix = half == 0 ? "_a" : half == 1 ? "_b" : "";
            std::string net = scopes_[scope].pool.claim(
                "dly_" + std::to_string(addr) + "_" + std::to_string(k) + suffix);
            declare_wire(scope, net, d.width);
            char buf[256];
            std::snprintf(buf, sizeof buf,
                          "  Delay_V #(.STAGES(%d), .WIDTH(%d)) u_dly_%d_%zu%s "
                          "(.clk(clk), .rst(rst), .d(%s), .q(%s));\n",
                          d.stages, d.width, addr, k, suffix.c_str(), src.c_str(),
                          net.c_str());
            scopes_[scope].body += buf;
            delay_nets_[{addr, static_cast<int>(k), half}] = net;
        }
    }
}

std::string Emitter::operand_conn(int scope, int addr, int k, int half) {
    const TreeNode& n = tree_.nodes[addr];
    const OperandRef& op = n.operands[k];
    if (op.kind == OperandRef::Kind::Constant) {
        if (n.op == OpKind::Power && k == 1) return hex8(op.value.raw);
        return hex32(op.value);
    }
    auto dn = delay_nets_.find({addr, k, half});
    if (dn != delay_nets_.end()) return dn->second;
    return operand_net(scope, addr, k, half);
}

void Emitter::emit_node(int scope, int addr) {
    const TreeNode& n = tree_.nodes[addr];
    ScopeData& sd = scopes_[scope];

    // declare result wires (top output ports are ports, not wires)
    for (size_t ri = 0; ri < n.results.size(); ++ri) {
        const std::string& w = wires_[addr][ri];
        bool is_port = scope == -1 &&
                       std::find(tree_.output_ports.begin(), tree_.output_ports.end(),
                                 w) != tree_.output_ports.end();
        if (!is_port) declare_wire(scope, w, n.op == OpKind::IfCompare ? 1 : 32);
    }

    if (opt_.pipelined) emit_delays(scope, addr);

    sd.body += "  // " + n.text + "\n";
    std::string inst = "u_" + op_instance_prefix(n.op) + "_" + std::to_string(addr);

    if (n.op == OpKind::Call) {
        if (!opt_.library)
            throw InternalError("library call without an open library at node " +
                                std::to_string(addr));
        std::string ctx = "normal";
        if (!n.blocks.empty())
            ctx = n.blocks.back().branch == Branch::If ? "if" : "else";
        const hwlib::Binding* b = opt_.library->binding(n.call_label, ctx);
        const hwlib::LibraryEntry* e = opt_.library->lookup(n.call_label);
        if (!b || !e)
            throw InternalError("no binding for library call '" + n.call_label + "'");
        sd.body += "  " + b->module_name + " " + inst + " (.clk(clk), .rst(rst)";
        size_t pi = 2; // port_order walks clk, rst, inputs..., outputs...
        for (size_t k = 0; k < n.operands.size(); ++k, ++pi)
            sd.body += ", ." + b->port_order.at(pi) + "(" +
                       operand_conn(scope, addr, static_cast<int>(k), -1) + ")";
        for (size_t ri = 0; ri < n.results.size(); ++ri, ++pi)
            sd.body += ", ." + b->port_order.at(pi) + "(" + wires_[addr][ri] + ")";
        sd.body += ");\n";
        return;
    }

    switch (n.op) {
    case OpKind::Add:
    case OpKind::Sub:
    case OpKind::Mul:
    case OpKind::Div:
    case OpKind::Log:
        sd.body += "  " + std::string(op_call_name(n.op)) + " " + inst +
                   " (.clk(clk), .rst(rst), .a(" +
                   operand_conn(scope, addr, 0, -1) + "), .b(" +
                   operand_conn(scope, addr, 1, -1) + "), .r(" + wires_[addr][0] +
                   "));\n";
        break;
    case OpKind::Power:
        sd.body += "  Power_V " + inst + " (.clk(clk), .rst(rst), .a(" +
                   operand_conn(scope, addr, 0, -1) + "), .e(" +
                   operand_conn(scope, addr, 1, -1) + "), .r(" + wires_[addr][0] +
                   "));\n";
        break;
    case OpKind::Sqrt:
    case OpKind::Value:
        sd.body += "  " + std::string(op_call_name(n.op)) + " " + inst +
                   " (.clk(clk), .rst(rst), .a(" + operand_conn(scope, addr, 0, -1) +
                   "), .r(" + wires_[addr][0] + "));\n";
        break;
    case OpKind::SinCosTan:
        sd.body += "  SinCosTan_V " + inst + " (.clk(clk), .rst(rst), .a(" +
                   operand_conn(scope, addr, 0, -1) + "), .s(" + wires_[addr][0] +
                   "), .c(" + wires_[addr][1] + "), .t(" + wires_[addr][2] + "));\n";
        break;
    case OpKind::IfCompare:
        sd.body += "  Compare_V #(.MODE(" + std::to_string(static_cast<int>(n.cmp)) +
                   ")) " + inst + " (.clk(clk), .rst(rst), .a(" +
                   operand_conn(scope, addr, 0, -1) + "), .b(" +
                   operand_conn(scope, addr, 1, -1) + "), .r(" + wires_[addr][0] +
                   "));\n";
        break;
    case OpKind::Merge:
        sd.body += "  Merge_V " + inst + " (.clk(clk), .rst(rst), .a(" +
                   operand_conn(scope, addr, 0, 0) + "), .b(" +
                   operand_conn(scope, addr, 0, 1) + "), .c(" +
                   operand_conn(scope, addr, 1, -1) + "), .r(" + wires_[addr][0] +
                   "));\n";
        break;
    default:
        throw InternalError("cannot emit node " + std::to_string(addr));
    }
}

void Emitter::emit_block(int parent_scope, const BlockTree::Block& b) {
    const TreeNode& cond = tree_.nodes[b.cond_node];
    int scope = b.id;

    // exports: one (if, else) source pair per merge of this block
    struct Export {
        std::string name;
        int if_src, else_src;
    };
    std::vector<Export> exports;
    for (const TreeNode& m : tree_.nodes) {
        if (m.op != OpKind::Merge || m.merge_block != b.id) continue;
        exports.push_back(
            {m.operands[0].name, m.prev[0].first, m.prev[0].second});
    }

    // body: comparison first, then both branch datapaths
    emit_node(scope, b.cond_node);
    emit_items(scope, b.if_items);
    emit_items(scope, b.else_items);

    // output ports and export assigns
    ScopeData& sd = scopes_[scope];
    std::string ports_decl, assigns;
    std::vector<std::string> port_names;
    for (const Export& ex : exports) {
        std::string pif = sd.pool.claim(ex.name + "_if_r");
        std::string pelse = sd.pool.claim(ex.name + "_else_r");
        ports_decl += "  output wire signed [31:0] " + pif + ",\n";
        ports_decl += "  output wire signed [31:0] " + pelse + ",\n";
        assigns += "  assign " + pif + " = " +
                   wires_[ex.if_src][result_idx(ex.if_src, ex.name)] + ";\n";
        assigns += "  assign " + pelse + " = " +
                   wires_[ex.else_src][result_idx(ex.else_src, ex.name)] + ";\n";
        port_names.push_back(pif);
        port_names.push_back(pelse);
    }
    std::string pcond = sd.pool.claim("cond_r");
    ports_decl += "  output wire " + pcond + "\n";
    assigns += "  assign " + pcond + " = " + wires_[b.cond_node][0] + ";\n";

    std::string mod_name = tree_.design_name + "_ifelse_" + std::to_string(b.id);
    std::string text;
    text += "// if/else block " + std::to_string(b.id) + " of " + tree_.design_name +
            ": " + cond.text + "\n";
    text += "module " + mod_name + " (\n";
    text += "  input  wire clk,\n";
    text += "  input  wire rst,\n";
    for (const auto& [port, parent_net] : sd.imports) {
        (void)parent_net;
        text += "  input  wire signed [31:0] " + port + ",\n";
    }
    text += ports_decl;
    text += ");\n";
    text += sd.wires;
    text += sd.body;
    text += assigns;
    text += "endmodule\n";
    block_files_.push_back({"ifelse_" + std::to_string(b.id) + ".v", text});

    // instance in the parent scope, plus the nets it feeds
    ScopeData& pd = scopes_[parent_scope];
    std::string inst_conn;
    for (const auto& [port, parent_net] : sd.imports)
        inst_conn += ", ." + port + "(" + parent_net + ")";
    size_t pni = 0;
    for (const Export& ex : exports) {
        std::string nif = pd.pool.claim(ex.name + "_if_r_" + std::to_string(b.id));
        std::string nelse = pd.pool.claim(ex.name + "_else_r_" + std::to_string(b.id));
        declare_wire(parent_scope, nif, 32);
        declare_wire(parent_scope, nelse, 32);
        pair_nets_[b.id][ex.name] = {nif, nelse};
        inst_conn += ", ." + port_names[pni++] + "(" + nif + ")";
        inst_conn += ", ." + port_names[pni++] + "(" + nelse + ")";
    }
    std::string ncond = pd.pool.claim("_cond_" + std::to_string(b.id));
    declare_wire(parent_scope, ncond, 1);
    cond_net_[b.id] = ncond;
    inst_conn += ", ." + pcond + "(" + ncond + ")";

    pd.body += "  // if/else block " + std::to_string(b.id) + ": " + cond.text + "\n";
    pd.body += "  " + mod_name + " u_blk_" + std::to_string(b.id) +
               " (.clk(clk), .rst(rst)" + inst_conn + ");\n";
}

void Emitter::emit_items(int scope, const std::vector<BlockTree::Item>& items) {
    for (const BlockTree::Item& it : items) {
        if (it.node >= 0) {
            if (tree_.nodes[it.node].cond_block >= 0) continue; // emitted in its block
            emit_node(scope, it.node);
        } else {
            emit_block(scope, bt_.blocks[it.block]);
        }
    }
}

std::string Emitter::top_module() {
    ScopeData& sd = scopes_[-1];
    std::string text;
    text += "// " + tree_.design_name + ": " +
            (opt_.pipelined ? std::string("pipelined") : std::string("unrolled")) +
            " dataflow implementation\n";
    text += "module " + tree_.design_name + " (\n";
    text += "  input  wire clk,\n";
    text += "  input  wire rst,\n";
    if (opt_.pipelined) text += "  input  wire start,\n";
    for (const std::string& p : tree_.input_ports)
        text += "  input  wire signed [31:0] " + p + ",\n";
    for (size_t i = 0; i < tree_.output_ports.size(); ++i) {
        text += "  output wire signed [31:0] " + tree_.output_ports[i];
        text += (opt_.pipelined || i + 1 < tree_.output_ports.size()) ? ",\n" : "\n";
    }
    if (opt_.pipelined) {
        text += "  output wire busy,\n";
        text += "  output wire valid\n";
    }
    text += ");\n";

    if (opt_.pipelined) {
        int total = sched_.total_cycles;
        int w = 1;
        while ((1 << w) <= total) ++w;
        std::string W = std::to_string(w);
        auto lit = [&](int v) { return W + "'d" + std::to_string(v); };
        text += "  // transaction tracker: counts compute cycles after a start\n";
        text += "  reg [" + std::to_string(w - 1) + ":0] count_r;\n";
        text += "  reg busy_r;\n";
        text += "  always @(posedge clk) begin\n";
        text += "    if (rst) begin\n";
        text += "      busy_r  <= 1'b0;\n";
        text += "      count_r <= " + lit(0) + ";\n";
        text += "    end else if (start && !busy_r) begin\n";
        text += "      busy_r  <= 1'b1;\n";
        text += "      count_r <= " + lit(1) + ";\n";
        text += "    end else if (busy_r) begin\n";
        text += "      if (count_r == " + lit(total) + ") begin\n";
        text += "        busy_r  <= 1'b0;\n";
        text += "        count_r <= " + lit(0) + ";\n";
        text += "      end else begin\n";
        text += "        count_r <= count_r + " + lit(1) + ";\n";
        text += "      end\n";
        text += "    end\n";
        text += "  end\n";
        text += "  assign busy  = busy_r;\n";
        text += "  assign valid = busy_r && (count_r == " + lit(total) + ");\n";
        text += "\n";
    }

    text += sd.wires;
    text += sd.body;
    text += "endmodule\n";
    return text;
}

std::vector<GeneratedFile> Emitter::run() {
    compute_scopes();
    name_wires();
    collect_imports();
    if (opt_.pipelined)
        for (const DelayElement& d : sched_.delays)
            chains_[{d.sink_node, d.sink_operand, d.pair_half}] = &d;

    emit_items(-1, bt_.top);

    std::vector<GeneratedFile> files;
    files.push_back({"top.v", top_module()});
    for (GeneratedFile& f : block_files_) files.push_back(std::move(f));
    return files;
}

} // namespace

std::vector<GeneratedFile> emit_design(const TreeArray& tree, const Schedule& sched,
                                       const CodegenOptions& opt) {
    Emitter e(tree, sched, opt);
    return e.run();
}

} // namespace hlsgen
