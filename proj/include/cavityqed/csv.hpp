// csv.hpp — small CSV writer with a leading metadata comment line

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <type_traits>
#include <string>
#include <vector>

#include "cavityqed/errors.hpp"

namespace cavityqed::csv {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

class Writer {
public:
    Writer(const std::filesystem::path& path, const std::string& comment, const std::vector<std::string>& columns)
        : path_(path), out_(path) {
        if (!out_) throw Error("cannot open " + path.string() + " for writing");
        out_ << "# " << comment << "\n";
        for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
        out_ << "\n";
    }

    template <typename... Ts>
    void row(const Ts&... fields) {
        std::size_t i = 0;
        ((out_ << (i++ ? "," : "") << cell(fields)), ...);
        out_ << "\n";
        ++rows_;
    }

    std::size_t rows() const { return rows_; }
    const std::filesystem::path& path() const { return path_; }

    void close() {
        out_.close();
        if (!out_) throw Error("failed writing " + path_.string());
    }

private:
    static std::string cell(double v) { return num(v); }
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    template <typename I>
    static std::string cell(I v) requires std::is_integral_v<I> { return std::to_string(v); }

    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t rows_{0};
};

}  // namespace cavityqed::csv
