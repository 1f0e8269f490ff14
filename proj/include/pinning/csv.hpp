// CSV emission with fixed formatting: 17 significant digits for doubles,
// '#'-prefixed metadata comments, LF line endings. Output depends only on the
// data, so identical runs produce byte-identical files.
#pragma once

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace pinning {

inline std::string format_sig17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format_hex16(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
    return buf;
}

class CsvWriter {
public:
    void comment(const std::string& s) {
        body_ += "# ";
        body_ += s;
        body_ += '\n';
    }
    void line(const std::string& s) {
        body_ += s;
        body_ += '\n';
    }
    void row(std::initializer_list<std::string> cells) {
        bool first = true;
        for (const std::string& c : cells) {
            if (!first) body_ += ',';
            body_ += c;
            first = false;
        }
        body_ += '\n';
    }
    const std::string& text() const { return body_; }

private:
    std::string body_;
};

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << content;
    if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace pinning
