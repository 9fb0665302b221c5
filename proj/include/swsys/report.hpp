#pragma once

// Line-oriented "key: value" report documents, the stable text format every
// command emits.

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "swsys/numeric.hpp"

namespace swsys {

class Report {
public:
    void section(const std::string& name) { lines_.push_back("== " + name + " =="); }

    void kv(const std::string& key, const std::string& value) {
        lines_.push_back(key + ": " + value);
    }
    void kv(const std::string& key, const char* value) { kv(key, std::string(value)); }
    void kv(const std::string& key, double value) { kv(key, format_double(value)); }
    void kv(const std::string& key, long value) { kv(key, std::to_string(value)); }
    void kv(const std::string& key, int value) { kv(key, std::to_string(value)); }
    void kv(const std::string& key, std::size_t value) { kv(key, std::to_string(value)); }
    void kv(const std::string& key, bool value) { kv(key, value ? "true" : "false"); }

    void line(const std::string& text) { lines_.push_back(text); }
    void blank() { lines_.emplace_back(); }

    std::string str() const {
        std::string out;
        for (const std::string& l : lines_) {
            out += l;
            out += '\n';
        }
        return out;
    }

    void write(const std::filesystem::path& path) const {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
        out << str();
    }

private:
    std::vector<std::string> lines_;
};

}  // namespace swsys
