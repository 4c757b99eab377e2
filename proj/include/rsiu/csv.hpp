#pragma once
// CSV output with a fixed float format so identical runs produce identical
// bytes. Vector-valued cells are ';'-joined.

#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rsiu/stats.hpp"

namespace rsiu {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

inline std::string fmt_vec(const VecD& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ';';
        s += fmt_double(v[i]);
    }
    return s;
}

inline std::string fmt_vec(const std::vector<long long>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ';';
        s += std::to_string(v[i]);
    }
    return s;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void write(std::ostream& os) const {
        for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
        os << '\n';
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
            os << '\n';
        }
    }

    std::string to_string() const {
        std::ostringstream os;
        write(os);
        return os.str();
    }
};

// Minimal parser for round-trip checks: splits on commas, no quoting (none of
// the emitted cells contain commas).
CsvTable parse_csv(const std::string& text);

} // namespace rsiu
