#pragma once

// Deterministic serialization for the CLI layer: shortest round-trip decimal
// formatting for doubles, CSV with LF line endings, and a common header
// record (tool version, config echo, seed) on every emitted file.

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace specgap {

inline constexpr const char* kToolName = "specgap";
inline constexpr const char* kToolVersion = "0.1.0";

// Shortest decimal string that parses back to exactly the same double.
inline std::string format_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, ptr);
}

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void comment(const std::string& text) { lines_.push_back("# " + text); }

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != columns_.size())
            throw std::invalid_argument("CsvWriter: cell count mismatch");
        lines_.push_back(join(cells));
    }

    void footer(const std::vector<std::string>& cells) { lines_.push_back(join(cells)); }

    std::string str() const {
        std::string out;
        bool header_done = false;
        for (const auto& line : lines_) {
            if (!header_done && line.rfind("# ", 0) != 0) {
                out += join(columns_);
                out += '\n';
                header_done = true;
            }
            out += line;
            out += '\n';
        }
        if (!header_done) {
            out += join(columns_);
            out += '\n';
        }
        return out;
    }

private:
    static std::string join(const std::vector<std::string>& cells) {
        std::string line;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) line += ',';
            line += cells[i];
        }
        return line;
    }

    std::vector<std::string> columns_;
    std::vector<std::string> lines_;
};

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline nlohmann::json report_header(const nlohmann::json& config_echo, std::uint64_t seed) {
    return nlohmann::json{{"tool", kToolName},
                          {"version", kToolVersion},
                          {"config", config_echo},
                          {"seed", seed}};
}

}  // namespace specgap
