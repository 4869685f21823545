#include "hlsgen/estimator.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "hlsgen/diagnostics.hpp"

namespace hlsgen {

CostTable CostTable::defaults() {
    CostTable t;
    t.ops["add"] = {32, 32, 0, 0};
    t.ops["sub"] = {32, 32, 0, 0};
    t.ops["mul"] = {238, 32, 4, 0};
    t.ops["div"] = {1056, 32, 0, 0};
    t.ops["power"] = {800, 32, 32, 0};
    t.ops["log"] = {2000, 32, 16, 0};
    t.ops["sqrt"] = {256, 32, 0, 0};
    t.ops["sincostan"] = {3000, 96, 0, 0};
    t.ops["value"] = {0, 32, 0, 0};
    t.ops["compare"] = {16, 1, 0, 0};
    t.ops["merge"] = {32, 32, 0, 0};
    return t;
}

hwlib::Resources CostTable::get(OpKind k) const {
    auto it = ops.find(op_cost_key(k));
    if (it == ops.end())
        throw InternalError(std::string("no cost entry for operator ") + op_name(k));
    return it->second;
}

void apply_cost_override(CostTable& table, const std::string& kv) {
    auto bad = [&](const std::string& why) {
        throw std::invalid_argument("bad cost override '" + kv + "': " + why);
    };
    size_t eq = kv.find('=');
    if (eq == std::string::npos) bad("expected key.field=value");
    size_t dot = kv.find('.');
    if (dot == std::string::npos || dot > eq) bad("expected key.field=value");
    std::string key = kv.substr(0, dot);
    std::string field = kv.substr(dot + 1, eq - dot - 1);
    std::string value = kv.substr(eq + 1);
    auto it = table.ops.find(key);
    if (it == table.ops.end()) bad("unknown operator '" + key + "'");
    long v = 0;
    try {
        size_t used = 0;
        v = std::stol(value, &used);
        if (used != value.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
        bad("value '" + value + "' is not an integer");
    }
    if (v < 0) bad("value must be non-negative");
    if (field == "lut") it->second.lut = static_cast<int>(v);
    else if (field == "ff") it->second.ff = static_cast<int>(v);
    else if (field == "dsp") it->second.dsp = static_cast<int>(v);
    else if (field == "bram") it->second.bram = static_cast<int>(v);
    else bad("unknown field '" + field + "'");
}

void load_cost_file(CostTable& table, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open cost file: " + path);
    std::string line;
    while (std::getline(in, line)) {
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        size_t e = line.find_last_not_of(" \t\r");
        apply_cost_override(table, line.substr(b, e - b + 1));
    }
}

namespace {

void accumulate(hwlib::Resources& total, const hwlib::Resources& r, int count = 1) {
    total.lut += r.lut * count;
    total.ff += r.ff * count;
    total.dsp += r.dsp * count;
    total.bram += r.bram * count;
}

int counter_width(int total_cycles) {
    int w = 1;
    while ((1 << w) <= total_cycles) ++w;
    return w;
}

} // namespace

Estimate estimate(const TreeArray& tree, const Schedule& sched,
                  const CostTable& costs, bool pipelined) {
    Estimate est;

    static const OpKind order[] = {
        OpKind::Add, OpKind::Sub, OpKind::Mul, OpKind::Div,
        OpKind::Power, OpKind::Log, OpKind::Sqrt, OpKind::SinCosTan,
        OpKind::Value, OpKind::IfCompare, OpKind::Merge,
    };
    std::map<std::string, int> call_counts;
    std::map<std::string, hwlib::Resources> call_res;
    std::map<OpKind, int> op_counts;
    for (const TreeNode& n : tree.nodes) {
        if (n.op == OpKind::Call) {
            call_counts[n.call_label] += 1;
            call_res[n.call_label] = n.call_resources;
        } else {
            op_counts[n.op] += 1;
        }
    }

    for (OpKind k : order) {
        auto it = op_counts.find(k);
        if (it == op_counts.end()) continue;
        EstimateLine line;
        line.label = op_name(k);
        line.count = it->second;
        accumulate(line.res, costs.get(k), line.count);
        accumulate(est.total, line.res);
        est.lines.push_back(line);
    }
    for (const auto& [label, count] : call_counts) {
        EstimateLine line;
        line.label = label;
        line.count = count;
        accumulate(line.res, call_res[label], count);
        accumulate(est.total, line.res);
        est.lines.push_back(line);
    }

    if (pipelined) {
        EstimateLine dly;
        dly.label = "delay";
        for (const DelayElement& d : sched.delays) {
            dly.count += d.stages;
            dly.res.ff += d.stages * d.width;
        }
        if (dly.count > 0) {
            accumulate(est.total, dly.res);
            est.lines.push_back(dly);
        }

        EstimateLine wrap;
        wrap.label = "wrapper";
        wrap.count = 1;
        int w = counter_width(sched.total_cycles);
        wrap.res.lut = w;
        wrap.res.ff = w;
        accumulate(est.total, wrap.res);
        est.lines.push_back(wrap);
    }
    return est;
}

namespace {

std::string row(const std::string& label, const std::string& count,
                const hwlib::Resources& r) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-16s%9s%9ld%9ld%9ld%9ld\n", label.c_str(),
                  count.c_str(), r.lut, r.ff, r.dsp, r.bram);
    return buf;
}

} // namespace

std::string emit_report(const TreeArray& tree, const Schedule& sched,
                        const Estimate& est, bool pipelined) {
    std::string out;
    out += "design: " + tree.design_name + "\n";
    out += std::string("mode: ") + (pipelined ? "pipelined" : "unrolled") + "\n";
    out += "nodes: " + std::to_string(tree.nodes.size()) + "\n";
    out += "cycles: " + std::to_string(sched.total_cycles) + "\n";
    out += std::string("interval: ") + (pipelined ? "1" : "NA") + "\n";
    char hdr[160];
    std::snprintf(hdr, sizeof hdr, "%-16s%9s%9s%9s%9s%9s\n", "operation", "count",
                  "lut", "ff", "dsp", "bram");
    out += hdr;
    for (const EstimateLine& line : est.lines)
        out += row(line.label, std::to_string(line.count), line.res);
    out += row("total", "-", est.total);
    return out;
}

} // namespace hlsgen
