#include "hlsgen/schedule.hpp"

#include <algorithm>
#include <map>

#include "hlsgen/diagnostics.hpp"

namespace hlsgen {

namespace {

int producer_width(const TreeArray& tree, int src_node) {
    if (src_node >= 0 && tree.nodes[src_node].op == OpKind::IfCompare) return 1;
    return 32;
}

} // namespace

Schedule schedule_asap(const TreeArray& tree) {
    const int n = static_cast<int>(tree.nodes.size());
    Schedule s;
    s.start.assign(n, 0);
    s.finish.assign(n, 0);

    for (int i = 0; i < n; ++i) {
        const TreeNode& node = tree.nodes[i];
        int latest = 0; // inputs and constants finish at cycle 0
        for (size_t k = 0; k < node.operands.size(); ++k) {
            const PrevAddr& p = node.prev[k];
            auto feed = [&](int a) {
                if (a < 0) return; // input or constant
                if (a >= i)
                    throw InternalError("node " + std::to_string(i) +
                                        " depends on later node " + std::to_string(a));
                latest = std::max(latest, s.finish[a]);
            };
            feed(p.first);
            if (p.is_pair()) feed(p.second);
        }
        s.start[i] = latest + 1;
        s.finish[i] = s.start[i] + node.delay_cycles - 1;
    }

    for (int i = 0; i < n; ++i) {
        const TreeNode& node = tree.nodes[i];
        for (size_t k = 0; k < node.operands.size(); ++k) {
            const OperandRef& op = node.operands[k];
            if (op.kind != OperandRef::Kind::Name) continue;
            const PrevAddr& p = node.prev[k];
            auto add_delay = [&](int src, int half) {
                int producer_finish = src < 0 ? 0 : s.finish[src];
                int gap = s.start[i] - producer_finish - 1;
                if (gap <= 0) return;
                DelayElement d;
                d.src_node = src;
                if (src < 0) d.src_input = op.name;
                d.sink_node = i;
                d.sink_operand = static_cast<int>(k);
                d.pair_half = half;
                d.stages = gap;
                d.width = producer_width(tree, src);
                s.delays.push_back(d);
            };
            if (p.is_pair()) {
                if (p.first < 0 || p.second < 0)
                    throw InternalError("unpadded branch pair reaches the scheduler "
                                        "at node " + std::to_string(i));
                add_delay(p.first, 0);
                add_delay(p.second, 1);
            } else {
                add_delay(p.first, -1);
            }
        }
    }

    // The transaction is done when the last producer of every output port
    // has finished.
    std::map<std::string, int> last_producer;
    for (int i = 0; i < n; ++i)
        for (const std::string& r : tree.nodes[i].results) last_producer[r] = i;
    int total = 0;
    bool any_output = false;
    for (const std::string& port : tree.output_ports) {
        auto it = last_producer.find(port);
        if (it == last_producer.end()) continue;
        any_output = true;
        total = std::max(total, s.finish[it->second]);
    }
    if (!any_output)
        for (int i = 0; i < n; ++i) total = std::max(total, s.finish[i]);
    s.total_cycles = total;
    return s;
}

std::string dump_schedule(const TreeArray& tree, const Schedule& sched) {
    std::string out;
    for (const TreeNode& n : tree.nodes)
        out += std::to_string(n.address) + " | " +
               std::to_string(sched.start[n.address]) + " | " +
               std::to_string(sched.finish[n.address]) + "\n";

    std::vector<DelayElement> delays = sched.delays;
    std::stable_sort(delays.begin(), delays.end(),
                     [](const DelayElement& a, const DelayElement& b) {
                         if (a.sink_node != b.sink_node) return a.sink_node < b.sink_node;
                         if (a.sink_operand != b.sink_operand)
                             return a.sink_operand < b.sink_operand;
                         return a.pair_half < b.pair_half;
                     });
    for (const DelayElement& d : delays) {
        std::string src = d.src_node < 0 ? d.src_input : std::to_string(d.src_node);
        std::string sink = std::to_string(d.sink_node) + "[" +
                           std::to_string(d.sink_operand) + "]";
        if (d.pair_half == 0) sink += ".if";
        if (d.pair_half == 1) sink += ".else";
        out += "delay " + src + " -> " + sink + " stages=" +
               std::to_string(d.stages) + " width=" + std::to_string(d.width) + "\n";
    }
    out += "total " + std::to_string(sched.total_cycles) + "\n";
    return out;
}

} // namespace hlsgen
