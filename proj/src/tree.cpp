#include "hlsgen/tree.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "hlsgen/diagnostics.hpp"
#include "hlsgen/fixedpoint.hpp"

namespace hlsgen {

namespace {

// ---------------------------------------------------------------- blocks --

bool same_frame(const BlockFrame& f, int block_id, Branch br) {
    return f.block_id == block_id && f.branch == br;
}

} // namespace

BlockTree parse_blocks(const TreeArray& tree) {
    BlockTree bt;
    struct Open {
        int block_index;
        Branch branch;
    };
    std::vector<Open> stack;
    std::map<int, int> block_index_by_id;
    std::map<int, int> cond_node_by_id;

    auto container = [&]() -> std::vector<BlockTree::Item>& {
        if (stack.empty()) return bt.top;
        BlockTree::Block& b = bt.blocks[stack.back().block_index];
        return stack.back().branch == Branch::If ? b.if_items : b.else_items;
    };

    for (int i = 0; i < static_cast<int>(tree.nodes.size()); ++i) {
        const TreeNode& n = tree.nodes[i];
        const std::vector<BlockFrame>& frames = n.blocks;

        // Length of the common prefix between the open stack and this
        // node's frame list.
        size_t keep = 0;
        while (keep < stack.size() && keep < frames.size() &&
               same_frame(frames[keep], bt.blocks[stack[keep].block_index].id,
                          stack[keep].branch))
            ++keep;
        stack.resize(keep);

        for (size_t d = keep; d < frames.size(); ++d) {
            const BlockFrame& f = frames[d];
            auto it = block_index_by_id.find(f.block_id);
            int bi;
            if (it == block_index_by_id.end()) {
                if (f.branch != Branch::If)
                    throw InternalError("block " + std::to_string(f.block_id) +
                                        " opens with its else branch");
                bi = static_cast<int>(bt.blocks.size());
                container().push_back(BlockTree::Item{-1, bi});
                bt.blocks.push_back(BlockTree::Block{});
                bt.blocks[bi].id = f.block_id;
                auto c = cond_node_by_id.find(f.block_id);
                if (c == cond_node_by_id.end())
                    throw InternalError("block " + std::to_string(f.block_id) +
                                        " has no condition node");
                bt.blocks[bi].cond_node = c->second;
                block_index_by_id[f.block_id] = bi;
            } else {
                bi = it->second;
            }
            stack.push_back(Open{bi, f.branch});
        }

        if (n.cond_block >= 0) {
            if (cond_node_by_id.count(n.cond_block))
                throw InternalError("duplicate condition for block " +
                                    std::to_string(n.cond_block));
            cond_node_by_id[n.cond_block] = i;
        }
        container().push_back(BlockTree::Item{i, -1});
    }
    return bt;
}

// -------------------------------------------------------------- resolver --

namespace {

struct Producer {
    int first = -1;
    int second = -1;
    bool pair = false;
};

struct Scope {
    std::map<std::string, Producer> defs;
    std::vector<std::string> order; // first-definition order

    void define(const std::string& name, Producer p) {
        if (!defs.count(name)) order.push_back(name);
        defs[name] = p;
    }
};

// Pre-merge placeholder for a pair nested inside another pair: the later of
// the two producers.  Never observable once merges are inserted.
int collapse(const Producer& p) {
    return p.pair ? std::max(p.first, p.second) : p.first;
}

struct Resolver {
    TreeArray& tree;
    const BlockTree& bt;
    std::set<std::string> inputs;

    Resolver(TreeArray& t, const BlockTree& b) : tree(t), bt(b) {
        inputs.insert(t.input_ports.begin(), t.input_ports.end());
    }

    const Producer* lookup(std::vector<Scope*>& chain, const std::string& name) {
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            auto d = (*it)->defs.find(name);
            if (d != (*it)->defs.end()) return &d->second;
        }
        return nullptr;
    }

    void resolve_node(int idx, std::vector<Scope*>& chain) {
        TreeNode& n = tree.nodes[idx];
        n.prev.assign(n.operands.size(), PrevAddr{});
        for (size_t k = 0; k < n.operands.size(); ++k) {
            const OperandRef& op = n.operands[k];
            if (op.kind != OperandRef::Kind::Name) continue; // constant: -1
            const Producer* p = lookup(chain, op.name);
            if (!p) {
                if (inputs.count(op.name)) continue; // primary input: -1
                throw InternalError("no producer for '" + op.name + "' at node " +
                                    std::to_string(n.address));
            }
            if (p->pair)
                n.prev[k] = PrevAddr{p->first, p->second, 2};
            else
                n.prev[k] = PrevAddr{p->first, -1, 1};
        }
        for (const std::string& r : n.results)
            chain.back()->define(r, Producer{n.address, -1, false});
    }

    void resolve_seq(const std::vector<BlockTree::Item>& items,
                     std::vector<Scope*>& chain) {
        for (const BlockTree::Item& it : items) {
            if (it.node >= 0) {
                resolve_node(it.node, chain);
                continue;
            }
            const BlockTree::Block& b = bt.blocks[it.block];
            Scope s_if, s_else;
            chain.push_back(&s_if);
            resolve_seq(b.if_items, chain);
            chain.pop_back();
            chain.push_back(&s_else);
            resolve_seq(b.else_items, chain);
            chain.pop_back();

            // Promote block-assigned names to the parent scope as
            // (if, else) producer pairs; a missing side stays -1 until the
            // padding pass supplies it.
            std::vector<std::string> names = s_if.order;
            for (const std::string& n2 : s_else.order)
                if (!s_if.defs.count(n2)) names.push_back(n2);
            for (const std::string& name : names) {
                auto a = s_if.defs.find(name);
                auto e = s_else.defs.find(name);
                Producer p;
                p.pair = true;
                p.first = a == s_if.defs.end() ? -1 : collapse(a->second);
                p.second = e == s_else.defs.end() ? -1 : collapse(e->second);
                chain.back()->define(name, p);
            }
        }
    }
};

} // namespace

void resolve_prev(TreeArray& tree) {
    for (int i = 0; i < static_cast<int>(tree.nodes.size()); ++i)
        tree.nodes[i].address = i;
    BlockTree bt = parse_blocks(tree);
    Resolver r(tree, bt);
    Scope global;
    std::vector<Scope*> chain{&global};
    r.resolve_seq(bt.top, chain);
}

// ------------------------------------------------------------ build_tree --

TreeArray build_tree(const std::vector<Statement>& stmts, const SourceProgram& prog,
                     const LatencyTable& latencies, const hwlib::Library* library) {
    TreeArray tree;
    tree.design_name = prog.name;
    tree.input_ports = prog.input_ports();
    tree.output_ports = prog.output_ports();
    tree.nodes.reserve(stmts.size());

    for (const Statement& st : stmts) {
        TreeNode n;
        n.address = static_cast<int>(tree.nodes.size());
        n.op = st.op;
        n.results = st.results;
        n.operands = st.operands;
        n.cmp = st.cmp;
        n.cond_block = st.cond_block;
        n.merge_block = st.merge_block;
        n.call_label = st.call_label;
        n.blocks = st.blocks;
        n.origin = st.origin;
        n.line = st.line;
        n.text = st.text;
        if (st.op == OpKind::Call) {
            if (!library)
                throw InternalError("library call '" + st.call_label +
                                    "' without an open library");
            const hwlib::LibraryEntry* e = library->lookup(st.call_label);
            if (!e)
                throw InternalError("library entry '" + st.call_label + "' vanished");
            n.delay_cycles = e->cycles;
            n.call_resources = e->resources;
        } else {
            n.delay_cycles = latencies.get(st.op);
        }
        tree.nodes.push_back(std::move(n));
    }
    resolve_prev(tree);
    return tree;
}

// --------------------------------------------------- padding and merging --

namespace {

// Names assigned anywhere under `items`, in first-assignment order.  Names
// produced inside a nested block count for the enclosing branch: after the
// inner block closes they are visible (and later merged) at this level.
void scan_assigned(const TreeArray& tree, const BlockTree& bt,
                   const std::vector<BlockTree::Item>& items,
                   std::vector<std::string>& order, std::set<std::string>& seen) {
    for (const BlockTree::Item& it : items) {
        if (it.node >= 0) {
            for (const std::string& r : tree.nodes[it.node].results)
                if (seen.insert(r).second) order.push_back(r);
        } else {
            const BlockTree::Block& b = bt.blocks[it.block];
            scan_assigned(tree, bt, b.if_items, order, seen);
            scan_assigned(tree, bt, b.else_items, order, seen);
        }
    }
}

std::vector<std::string> assigned_names(const TreeArray& tree, const BlockTree& bt,
                                        const std::vector<BlockTree::Item>& items) {
    std::vector<std::string> order;
    std::set<std::string> seen;
    scan_assigned(tree, bt, items, order, seen);
    return order;
}

TreeNode make_pad(const std::string& name, const std::vector<BlockFrame>& frames,
                  int line) {
    Statement st;
    st.op = OpKind::Value;
    st.results = {name};
    st.operands = {OperandRef::make_const(fx::FixedValue{0})};
    TreeNode n;
    n.op = OpKind::Value;
    n.results = {name};
    n.operands = st.operands;
    n.delay_cycles = 1;
    n.blocks = frames;
    n.origin = StmtOrigin::Padding;
    n.line = line;
    n.text = statement_text(st);
    return n;
}

struct Rebuilder {
    const TreeArray& tree;
    const BlockTree& bt;
    std::vector<TreeNode> out;

    void emit(TreeNode n, const std::vector<BlockFrame>& frames) {
        n.blocks = frames;
        n.address = static_cast<int>(out.size());
        out.push_back(std::move(n));
    }

    // pad == true appends missing-name zero Values to each deficient
    // branch; pad == false appends Merge nodes after each block.
    void walk(const std::vector<BlockTree::Item>& items,
              std::vector<BlockFrame> frames, bool pad, int merge_delay) {
        for (const BlockTree::Item& it : items) {
            if (it.node >= 0) {
                emit(tree.nodes[it.node], frames);
                continue;
            }
            const BlockTree::Block& b = bt.blocks[it.block];
            const TreeNode& cond = tree.nodes[b.cond_node];
            std::vector<std::string> in_if = assigned_names(tree, bt, b.if_items);
            std::vector<std::string> in_else = assigned_names(tree, bt, b.else_items);
            std::set<std::string> if_set(in_if.begin(), in_if.end());
            std::set<std::string> else_set(in_else.begin(), in_else.end());

            std::vector<BlockFrame> if_frames = frames;
            if_frames.push_back(BlockFrame{b.id, Branch::If});
            std::vector<BlockFrame> else_frames = frames;
            else_frames.push_back(BlockFrame{b.id, Branch::Else});

            walk(b.if_items, if_frames, pad, merge_delay);
            if (pad)
                for (const std::string& name : in_else)
                    if (!if_set.count(name))
                        emit(make_pad(name, if_frames, cond.line), if_frames);

            walk(b.else_items, else_frames, pad, merge_delay);
            if (pad)
                for (const std::string& name : in_if)
                    if (!else_set.count(name))
                        emit(make_pad(name, else_frames, cond.line), else_frames);

            if (!pad) {
                std::vector<std::string> names = in_if;
                for (const std::string& n2 : in_else)
                    if (!if_set.count(n2)) names.push_back(n2);
                for (const std::string& name : names) {
                    Statement st;
                    st.op = OpKind::Merge;
                    st.results = {name};
                    st.operands = {OperandRef::make_name(name),
                                   OperandRef::make_name(cond.results.at(0))};
                    st.merge_block = b.id;
                    TreeNode m;
                    m.op = OpKind::Merge;
                    m.results = st.results;
                    m.operands = st.operands;
                    m.delay_cycles = merge_delay;
                    m.merge_block = b.id;
                    m.origin = StmtOrigin::MergeSynth;
                    m.line = cond.line;
                    m.text = statement_text(st);
                    emit(std::move(m), frames);
                }
            }
        }
    }
};

} // namespace

void pad_else_branch(TreeArray& tree) {
    BlockTree bt = parse_blocks(tree);
    Rebuilder rb{tree, bt, {}};
    rb.walk(bt.top, {}, /*pad=*/true, 1);
    tree.nodes = std::move(rb.out);
    resolve_prev(tree);
}

void insert_merges(TreeArray& tree, const LatencyTable& latencies) {
    BlockTree bt = parse_blocks(tree);
    Rebuilder rb{tree, bt, {}};
    rb.walk(bt.top, {}, /*pad=*/false, latencies.get(OpKind::Merge));
    tree.nodes = std::move(rb.out);
    resolve_prev(tree);
}

// ----------------------------------------------------------------- dump --

namespace {

std::string render_operand(const TreeNode& n, size_t k) {
    const OperandRef& op = n.operands[k];
    switch (op.kind) {
    case OperandRef::Kind::Name:
        return op.name;
    case OperandRef::Kind::Constant:
        if (n.op == OpKind::Power && k == 1)
            return std::to_string(op.value.raw >> 16);
        return fx::to_hex(op.value);
    case OperandRef::Kind::BareLiteral:
        return op.literal;
    }
    return "?";
}

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += v[i];
    }
    return s;
}

} // namespace

std::string dump_ir(const TreeArray& tree) {
    std::string out;
    out += "design " + tree.design_name + "\n";
    out += "inputs " + join(tree.input_ports) + "\n";
    out += "outputs " + join(tree.output_ports) + "\n";
    for (const TreeNode& n : tree.nodes) {
        std::vector<std::string> ops, prevs, counts;
        for (size_t k = 0; k < n.operands.size(); ++k) {
            ops.push_back(render_operand(n, k));
            const PrevAddr& p = n.prev[k];
            if (p.is_pair())
                prevs.push_back("(" + std::to_string(p.first) + "," +
                                std::to_string(p.second) + ")");
            else
                prevs.push_back(std::to_string(p.first));
            counts.push_back(std::to_string(p.count));
        }
        out += std::to_string(n.address) + " | " + op_name(n.op) + " | " +
               join(n.results) + " | " + join(ops) + " | " + join(prevs) + " | " +
               join(counts) + " | " + std::to_string(n.delay_cycles) + "\n";
    }
    return out;
}

} // namespace hlsgen
