#include "hlsgen/simulate.hpp"

#include <array>
#include <optional>
#include <vector>

#include "hlsgen/diagnostics.hpp"

namespace hlsgen {

namespace {

int result_index(const TreeNode& producer, const std::string& name) {
    for (size_t i = 0; i < producer.results.size(); ++i)
        if (producer.results[i] == name) return static_cast<int>(i);
    throw InternalError("node " + std::to_string(producer.address) +
                        " does not produce '" + name + "'");
}

std::vector<fx::FixedValue> eval_op(const TreeNode& n,
                                    const std::vector<fx::FixedValue>& a,
                                    fx::EvalWarnings* w) {
    switch (n.op) {
    case OpKind::Add: return {fx::add(a.at(0), a.at(1))};
    case OpKind::Sub: return {fx::sub(a.at(0), a.at(1))};
    case OpKind::Mul: return {fx::mul(a.at(0), a.at(1))};
    case OpKind::Div: return {fx::div(a.at(0), a.at(1), w)};
    case OpKind::Power: return {fx::power(a.at(0), a.at(1).raw >> 16, w)};
    case OpKind::Log: return {fx::log(a.at(0), a.at(1))};
    case OpKind::Sqrt: return {fx::sqrt(a.at(0))};
    case OpKind::SinCosTan: {
        fx::SinCosTan s = fx::sincostan(a.at(0));
        return {s.sin_v, s.cos_v, s.tan_v};
    }
    case OpKind::Value: return {fx::value(a.at(0))};
    case OpKind::IfCompare: return {fx::compare(a.at(0), a.at(1), n.cmp)};
    case OpKind::Call:
        throw SimUnsupported("library call '" + n.call_label +
                             "' has no built-in evaluation model");
    case OpKind::Merge:
    case OpKind::Unknown:
        break;
    }
    throw InternalError("unexpected operator in evaluation at node " +
                        std::to_string(n.address));
}

std::map<std::string, int> last_producers(const TreeArray& tree) {
    std::map<std::string, int> lp;
    for (const TreeNode& n : tree.nodes)
        for (const std::string& r : n.results) lp[r] = n.address;
    return lp;
}

std::map<std::string, fx::FixedValue>
collect_outputs(const TreeArray& tree,
                const std::vector<std::vector<fx::FixedValue>>& values) {
    std::map<std::string, int> lp = last_producers(tree);
    std::map<std::string, fx::FixedValue> out;
    for (const std::string& port : tree.output_ports) {
        auto it = lp.find(port);
        if (it == lp.end())
            throw InternalError("output port '" + port + "' is never produced");
        out[port] = values[it->second][result_index(tree.nodes[it->second], port)];
    }
    return out;
}

} // namespace

SimResult simulate_graph(const TreeArray& tree,
                         const std::map<std::string, fx::FixedValue>& inputs) {
    SimResult res;
    std::vector<std::vector<fx::FixedValue>> values(tree.nodes.size());

    auto read_single = [&](const TreeNode& n, size_t k) -> fx::FixedValue {
        const OperandRef& op = n.operands[k];
        if (op.kind == OperandRef::Kind::Constant) return op.value;
        if (op.kind == OperandRef::Kind::BareLiteral)
            throw InternalError("bare literal survived validation at node " +
                                std::to_string(n.address));
        const PrevAddr& p = n.prev[k];
        if (p.is_pair())
            throw InternalError("branch pair on a non-merge operand at node " +
                                std::to_string(n.address));
        if (p.first < 0) {
            auto it = inputs.find(op.name);
            if (it == inputs.end())
                throw InternalError("no stimulus for input '" + op.name + "'");
            return it->second;
        }
        return values[p.first][result_index(tree.nodes[p.first], op.name)];
    };

    for (const TreeNode& n : tree.nodes) {
        if (n.op == OpKind::Merge) {
            const PrevAddr& p = n.prev.at(0);
            if (!p.is_pair() || p.first < 0 || p.second < 0)
                throw InternalError("merge without a complete branch pair at node " +
                                    std::to_string(n.address));
            const std::string& name = n.operands[0].name;
            fx::FixedValue if_v =
                values[p.first][result_index(tree.nodes[p.first], name)];
            fx::FixedValue else_v =
                values[p.second][result_index(tree.nodes[p.second], name)];
            fx::FixedValue cond = read_single(n, 1);
            values[n.address] = {fx::merge(if_v, else_v, cond)};
            continue;
        }
        std::vector<fx::FixedValue> args;
        args.reserve(n.operands.size());
        for (size_t k = 0; k < n.operands.size(); ++k)
            args.push_back(read_single(n, k));
        values[n.address] = eval_op(n, args, &res.warnings);
    }

    res.outputs = collect_outputs(tree, values);
    return res;
}

std::set<std::string> approx_outputs(const TreeArray& tree) {
    std::vector<char> tainted(tree.nodes.size(), 0);
    for (const TreeNode& n : tree.nodes) {
        char t = (n.op == OpKind::SinCosTan || n.op == OpKind::Log) ? 1 : 0;
        for (const PrevAddr& p : n.prev) {
            if (p.first >= 0 && tainted[p.first]) t = 1;
            if (p.is_pair() && p.second >= 0 && tainted[p.second]) t = 1;
        }
        tainted[n.address] = t;
    }
    std::map<std::string, int> lp = last_producers(tree);
    std::set<std::string> out;
    for (const std::string& port : tree.output_ports) {
        auto it = lp.find(port);
        if (it != lp.end() && tainted[it->second]) out.insert(port);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cycle-accurate replay
// ---------------------------------------------------------------------------

SimResult simulate_scheduled(const TreeArray& tree, const Schedule& sched,
                             const std::map<std::string, fx::FixedValue>& inputs) {
    SimResult res;
    const int n = static_cast<int>(tree.nodes.size());

    using Maybe = std::optional<fx::FixedValue>;
    std::vector<std::optional<std::vector<fx::FixedValue>>> regs(n);

    struct Chain {
        const DelayElement* d;
        std::vector<Maybe> stages; // stages[0] newest, back() is the output
    };
    std::vector<Chain> chains;
    std::map<std::array<int, 3>, int> chain_at; // sink, operand, half
    for (const DelayElement& d : sched.delays) {
        chain_at[{d.sink_node, d.sink_operand, d.pair_half}] =
            static_cast<int>(chains.size());
        chains.push_back(Chain{&d, std::vector<Maybe>(d.stages)});
    }

    auto input_value = [&](const std::string& name) -> fx::FixedValue {
        auto it = inputs.find(name);
        if (it == inputs.end())
            throw InternalError("no stimulus for input '" + name + "'");
        return it->second;
    };
    auto reg_value = [&](int addr, const std::string& name) -> Maybe {
        if (!regs[addr]) return std::nullopt;
        return (*regs[addr])[result_index(tree.nodes[addr], name)];
    };
    // Value on the edge (sink, operand, half) as seen at the start of the
    // current cycle: through the delay chain when one exists, otherwise
    // straight from the producer register / input / constant.
    auto edge_value = [&](int i, int k, int half, int src) -> fx::FixedValue {
        const TreeNode& node = tree.nodes[i];
        const OperandRef& op = node.operands[k];
        if (op.kind == OperandRef::Kind::Constant) return op.value;
        auto ch = chain_at.find({i, k, half});
        if (ch != chain_at.end()) {
            const Maybe& v = chains[ch->second].stages.back();
            if (!v)
                throw InternalError(
                    "node " + std::to_string(i) + " sampled an unfilled delay chain "
                    "(operand " + std::to_string(k) + ")");
            return *v;
        }
        if (src < 0) {
            // No chain: the producer must have finished exactly one cycle
            // before this sample, which for an input means sampling at
            // cycle 1.  Anything else is a missing delay chain.
            if (sched.start[i] != 1)
                throw InternalError("node " + std::to_string(i) +
                                    " reads input '" + op.name +
                                    "' across a gap with no delay chain");
            return input_value(op.name);
        }
        if (sched.finish[src] != sched.start[i] - 1)
            throw InternalError("node " + std::to_string(i) + " reads node " +
                                std::to_string(src) +
                                " across a gap with no delay chain");
        Maybe v = reg_value(src, op.name);
        if (!v)
            throw InternalError("node " + std::to_string(i) +
                                " sampled node " + std::to_string(src) +
                                " before it finished");
        return *v;
    };

    struct Pending {
        int node;
        std::vector<fx::FixedValue> results;
    };
    struct Inflight {
        int at;
        int node;
        std::vector<fx::FixedValue> results;
    };
    // Multi-cycle nodes sample at their start cycle but commit at finish.
    std::vector<Inflight> inflight;

    for (int t = 1; t <= sched.total_cycles; ++t) {
        // Sample and compute everything that starts this cycle, reading the
        // state committed at the end of cycle t-1.
        std::vector<Pending> computed;
        for (int i = 0; i < n; ++i) {
            if (sched.start[i] != t) continue;
            const TreeNode& node = tree.nodes[i];
            if (node.op == OpKind::Merge) {
                const PrevAddr& p = node.prev.at(0);
                fx::FixedValue if_v = edge_value(i, 0, 0, p.first);
                fx::FixedValue else_v = edge_value(i, 0, 1, p.second);
                fx::FixedValue cond = edge_value(i, 1, -1, node.prev[1].first);
                computed.push_back({i, {fx::merge(if_v, else_v, cond)}});
                continue;
            }
            std::vector<fx::FixedValue> args;
            for (size_t k = 0; k < node.operands.size(); ++k)
                args.push_back(edge_value(i, static_cast<int>(k), -1,
                                          node.prev[k].first));
            computed.push_back({i, eval_op(node, args, &res.warnings)});
        }

        // Shift every delay chain by one stage, also from the end-of-t-1
        // state.
        std::vector<Maybe> new_heads(chains.size());
        for (size_t c = 0; c < chains.size(); ++c) {
            const DelayElement& d = *chains[c].d;
            if (d.src_node < 0)
                new_heads[c] = input_value(d.src_input);
            else
                new_heads[c] = reg_value(d.src_node,
                                         tree.nodes[d.sink_node].operands[d.sink_operand].name);
        }
        for (size_t c = 0; c < chains.size(); ++c) {
            auto& st = chains[c].stages;
            for (size_t s = st.size(); s-- > 1;) st[s] = st[s - 1];
            st[0] = new_heads[c];
        }

        // Commit node registers whose computation finishes this cycle;
        // longer-latency results wait in flight until theirs.
        for (Pending& p : computed) {
            if (sched.finish[p.node] == t)
                regs[p.node] = std::move(p.results);
            else
                inflight.push_back({sched.finish[p.node], p.node, std::move(p.results)});
        }
        for (size_t q = 0; q < inflight.size();) {
            if (inflight[q].at == t) {
                regs[inflight[q].node] = std::move(inflight[q].results);
                inflight.erase(inflight.begin() + q);
            } else {
                ++q;
            }
        }
    }

    std::vector<std::vector<fx::FixedValue>> values(n);
    for (int i = 0; i < n; ++i)
        if (regs[i]) values[i] = *regs[i];
    std::map<std::string, int> lp = last_producers(tree);
    for (const std::string& port : tree.output_ports) {
        auto it = lp.find(port);
        if (it == lp.end() || !regs[it->second])
            throw InternalError("output '" + port + "' undefined after the last cycle");
    }
    res.outputs = collect_outputs(tree, values);
    return res;
}

} // namespace hlsgen
