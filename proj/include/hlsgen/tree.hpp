#pragma once

#include <map>
#include <string>
#include <vector>

#include "hlsgen/hwlib.hpp"
#include "hlsgen/source.hpp"
#include "hlsgen/statement.hpp"

namespace hlsgen {

// Producer address(es) of one operand.  count == 1 is the normal case; a
// pair (count == 2) records the if-branch and else-branch producers of a
// name assigned on both sides of an if/else block.  After merge insertion,
// pairs appear only on the value operand of Merge nodes.  -1 marks a primary
// input or constant (single) or a not-yet-padded branch (pair half).
struct PrevAddr {
    int first = -1;
    int second = -1;
    int count = 1;

    bool is_pair() const { return count == 2; }
    friend bool operator==(const PrevAddr& a, const PrevAddr& b) {
        return a.first == b.first && a.second == b.second && a.count == b.count;
    }
};

struct TreeNode {
    int address = -1;
    OpKind op = OpKind::Unknown;
    std::vector<std::string> results;
    std::vector<OperandRef> operands;
    std::vector<PrevAddr> prev; // parallel to operands
    int delay_cycles = 1;

    fx::Cmp cmp = fx::Cmp::Gt;
    int cond_block = -1; // IfCompare: block opened by this condition
    int merge_block = -1; // Merge: block reconciled by this node
    std::string call_label;
    hwlib::Resources call_resources;

    std::vector<BlockFrame> blocks; // enclosing if/else context
    StmtOrigin origin = StmtOrigin::Source;
    int line = 0;
    std::string text;

    int n_results() const { return static_cast<int>(results.size()); }
    int n_operands() const { return static_cast<int>(operands.size()); }
};

struct TreeArray {
    std::string design_name;
    std::vector<std::string> input_ports;  // arrays expanded, declared order
    std::vector<std::string> output_ports;
    std::vector<TreeNode> nodes;
};

// Per-operation latency in cycles; every catalog function defaults to 1.
// Library calls take their latency from the registered entry instead.
struct LatencyTable {
    std::map<std::string, int> cycles; // keyed by op_cost_key()

    int get(OpKind k) const {
        auto it = cycles.find(op_cost_key(k));
        return it == cycles.end() ? 1 : it->second;
    }
};

// Nested block structure recovered from the frame annotations.  Shared by
// the resolver, the structural passes and code generation.
struct BlockTree {
    struct Item {
        int node = -1;  // index into TreeArray::nodes, or
        int block = -1; // index into `blocks`
    };
    struct Block {
        int id = -1;
        int cond_node = -1; // node index of the IfCompare
        std::vector<Item> if_items;
        std::vector<Item> else_items;
    };
    std::vector<Item> top;
    std::vector<Block> blocks;
};

BlockTree parse_blocks(const TreeArray& tree);

// Creates one node per statement and resolves producer addresses.  Before
// padding, a name assigned on only one side of a block resolves to a pair
// with a -1 half.
TreeArray build_tree(const std::vector<Statement>& stmts, const SourceProgram& prog,
                     const LatencyTable& latencies, const hwlib::Library* library = nullptr);

// Appends `name = 0` Value nodes to whichever branch of each block misses an
// assignment the other branch has, then renumbers and re-resolves.
void pad_else_branch(TreeArray& tree);

// Appends one Merge node per block-assigned name directly after each block
// (inner blocks first).  The merge consumes the (if, else) pair and the
// block's condition, and becomes the post-block producer of the name.
void insert_merges(TreeArray& tree, const LatencyTable& latencies);

// Recomputes every prev address from scratch; idempotent.
void resolve_prev(TreeArray& tree);

// Line-oriented dump: addr | op | results | operands | prev | nprev | delay
std::string dump_ir(const TreeArray& tree);

} // namespace hlsgen
