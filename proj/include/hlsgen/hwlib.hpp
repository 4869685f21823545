#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace hlsgen::hwlib {

struct Resources {
    long lut = 0;
    long ff = 0;
    long dsp = 0;
    long bram = 0;
};

// A previously synthesized module registered for reuse.  The label keys the
// manifest; Call_V statements reference it.  `inputs`/`outputs` keep the
// declared order, which defines the positional port binding:
//   clk, rst, inputs..., outputs...
// Library entries are exempt from the 20-name limit that applies to
// top-level designs.
struct LibraryEntry {
    std::string label;
    std::string verilog_file; // file name inside the library directory
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    int cycles = 1;
    Resources resources;
};

// One call-site binding descriptor; registration generates three of these
// (normal, if-branch, else-branch context) so a Call_V can appear anywhere a
// catalog function can.
struct Binding {
    std::string context;     // "normal", "if", "else"
    std::string module_name; // Verilog module to instantiate
    std::vector<std::string> port_order; // positional: clk, rst, ins..., outs...
};

class LibError : public std::runtime_error {
  public:
    enum class Kind { DuplicateLabel, MissingFile, ArityError, NotFound, CorruptManifest, LockTimeout };

    LibError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
    Kind kind() const { return kind_; }

  private:
    Kind kind_;
};

class Library {
  public:
    Library() = default;

    // Loads <dir>/manifest.json when it exists; a missing directory or
    // manifest yields an empty library bound to that directory.
    static Library open(const std::filesystem::path& dir);

    // Copies `verilog_source` into the library directory, adds the entry and
    // its three bindings, and rewrites the manifest under a lock file.
    // Throws DuplicateLabel unless `force`, MissingFile when the source does
    // not exist, ArityError when either port list is empty.
    void register_module(const LibraryEntry& entry, const std::filesystem::path& verilog_source,
                         bool force = false);

    const LibraryEntry* lookup(const std::string& label) const;
    const Binding* binding(const std::string& label, const std::string& context) const;

    std::vector<const LibraryEntry*> entries() const; // label-sorted
    const std::filesystem::path& dir() const { return dir_; }
    bool empty() const { return entries_.empty(); }

  private:
    void save() const;

    std::filesystem::path dir_;
    std::map<std::string, LibraryEntry> entries_;
    std::map<std::string, std::vector<Binding>> bindings_;
};

} // namespace hlsgen::hwlib
