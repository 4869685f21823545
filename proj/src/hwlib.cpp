#include "hlsgen/hwlib.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <chrono>
#include <fstream>
#include <thread>

#include <json.hpp>

namespace hlsgen::hwlib {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr const char* kManifestName = "manifest.json";
constexpr const char* kLockName = "manifest.lock";

// Manifests are shared between concurrent tool runs; updates go through an
// exclusive-create lock file so two registrations cannot interleave their
// read-modify-write.
class ManifestLock {
  public:
    explicit ManifestLock(const fs::path& dir) : path_(dir / kLockName) {
        for (int attempt = 0; attempt < 200; ++attempt) {
            int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
            if (fd >= 0) {
                ::close(fd);
                held_ = true;
                return;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(25));
        }
        throw LibError(LibError::Kind::LockTimeout,
                       "could not acquire library lock " + path_.string());
    }
    ~ManifestLock() {
        if (held_) ::unlink(path_.c_str());
    }
    ManifestLock(const ManifestLock&) = delete;
    ManifestLock& operator=(const ManifestLock&) = delete;

  private:
    fs::path path_;
    bool held_ = false;
};

std::vector<Binding> make_bindings(const LibraryEntry& e) {
    std::vector<std::string> ports;
    ports.push_back("clk");
    ports.push_back("rst");
    for (const std::string& p : e.inputs) ports.push_back(p);
    for (const std::string& p : e.outputs) ports.push_back(p);
    std::vector<Binding> out;
    for (const char* ctx : {"normal", "if", "else"})
        out.push_back(Binding{ctx, e.label, ports});
    return out;
}

ordered_json resources_json(const Resources& r) {
    ordered_json j;
    j["lut"] = r.lut;
    j["ff"] = r.ff;
    j["dsp"] = r.dsp;
    j["bram"] = r.bram;
    return j;
}

Resources resources_from(const ordered_json& j) {
    Resources r;
    r.lut = j.value("lut", 0L);
    r.ff = j.value("ff", 0L);
    r.dsp = j.value("dsp", 0L);
    r.bram = j.value("bram", 0L);
    return r;
}

} // namespace

Library Library::open(const fs::path& dir) {
    Library lib;
    lib.dir_ = dir;
    fs::path manifest = dir / kManifestName;
    if (!fs::exists(manifest)) return lib;

    std::ifstream in(manifest);
    ordered_json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw LibError(LibError::Kind::CorruptManifest,
                       manifest.string() + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("modules") || !doc["modules"].is_array())
        throw LibError(LibError::Kind::CorruptManifest,
                       manifest.string() + ": expected a top-level \"modules\" array");

    for (const ordered_json& m : doc["modules"]) {
        try {
            LibraryEntry e;
            e.label = m.at("label").get<std::string>();
            e.verilog_file = m.at("verilog").get<std::string>();
            e.inputs = m.at("inputs").get<std::vector<std::string>>();
            e.outputs = m.at("outputs").get<std::vector<std::string>>();
            e.cycles = m.at("cycles").get<int>();
            e.resources = resources_from(m.at("resources"));
            std::vector<Binding> binds;
            for (const ordered_json& b : m.at("bindings")) {
                Binding bd;
                bd.context = b.at("context").get<std::string>();
                bd.module_name = b.at("module").get<std::string>();
                bd.port_order = b.at("port_order").get<std::vector<std::string>>();
                binds.push_back(std::move(bd));
            }
            lib.bindings_[e.label] = std::move(binds);
            lib.entries_[e.label] = std::move(e);
        } catch (const ordered_json::exception& e) {
            throw LibError(LibError::Kind::CorruptManifest,
                           manifest.string() + ": " + e.what());
        }
    }
    return lib;
}

void Library::register_module(const LibraryEntry& entry, const fs::path& verilog_source,
                              bool force) {
    if (entry.inputs.empty() || entry.outputs.empty())
        throw LibError(LibError::Kind::ArityError,
                       "module '" + entry.label + "' needs at least one input and one output");
    if (entry.cycles < 1)
        throw LibError(LibError::Kind::ArityError,
                       "module '" + entry.label + "' must take at least one cycle");
    if (!fs::exists(verilog_source))
        throw LibError(LibError::Kind::MissingFile,
                       "no such file: " + verilog_source.string());

    fs::create_directories(dir_);
    ManifestLock lock(dir_);

    // Re-read under the lock so concurrent registrations merge.
    Library current = Library::open(dir_);
    entries_ = std::move(current.entries_);
    bindings_ = std::move(current.bindings_);

    if (!force && entries_.count(entry.label))
        throw LibError(LibError::Kind::DuplicateLabel,
                       "label '" + entry.label + "' is already registered");

    LibraryEntry e = entry;
    e.verilog_file = entry.label + ".v";
    fs::copy_file(verilog_source, dir_ / e.verilog_file,
                  fs::copy_options::overwrite_existing);
    bindings_[e.label] = make_bindings(e);
    entries_[e.label] = std::move(e);
    save();
}

const LibraryEntry* Library::lookup(const std::string& label) const {
    auto it = entries_.find(label);
    return it == entries_.end() ? nullptr : &it->second;
}

const Binding* Library::binding(const std::string& label, const std::string& context) const {
    auto it = bindings_.find(label);
    if (it == bindings_.end()) return nullptr;
    for (const Binding& b : it->second)
        if (b.context == context) return &b;
    return nullptr;
}

std::vector<const LibraryEntry*> Library::entries() const {
    std::vector<const LibraryEntry*> out;
    for (const auto& [label, e] : entries_) out.push_back(&e);
    return out; // std::map iterates label-sorted
}

void Library::save() const {
    ordered_json doc;
    doc["modules"] = ordered_json::array();
    for (const auto& [label, e] : entries_) {
        ordered_json m;
        m["label"] = e.label;
        m["verilog"] = e.verilog_file;
        m["inputs"] = e.inputs;
        m["outputs"] = e.outputs;
        m["cycles"] = e.cycles;
        m["resources"] = resources_json(e.resources);
        m["bindings"] = ordered_json::array();
        auto bit = bindings_.find(label);
        if (bit != bindings_.end()) {
            for (const Binding& b : bit->second) {
                ordered_json bj;
                bj["context"] = b.context;
                bj["module"] = b.module_name;
                bj["port_order"] = b.port_order;
                m["bindings"].push_back(bj);
            }
        }
        doc["modules"].push_back(m);
    }
    fs::path tmp = dir_ / (std::string(kManifestName) + ".tmp");
    {
        std::ofstream out(tmp);
        out << doc.dump(2) << "\n";
    }
    fs::rename(tmp, dir_ / kManifestName);
}

} // namespace hlsgen::hwlib
