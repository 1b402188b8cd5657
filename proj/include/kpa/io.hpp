#pragma once

#include <cstddef>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kpa/perm_array.hpp"
#include "kpa/permutation.hpp"

namespace kpa {

/// Array file format:
///
///   # n=8 d=3 m=2 provenance=free text to end of line
///   # any other comment
///   0 5 3 1 4 6 2 7
///   - - 13 - 14 - ...
///
/// A '-' token is a blank: blanks are filled, left to right, with the symbols
/// missing from the line in increasing order. Files whose explicit symbols
/// include n (and never 0) are read as 1-based and shifted down; `base=1` or
/// `base=0` in a header forces the choice.
struct ArrayHeader {
    std::optional<std::size_t> n;
    std::optional<std::size_t> d;
    std::optional<std::size_t> m;
    std::optional<int> base;
    std::string provenance;
    std::vector<std::string> comments;
    /// Other key=value pairs, e.g. ops= on representative files.
    std::map<std::string, std::string, std::less<>> extra;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::size_t parse_count(std::string_view key, std::string_view value) {
    try {
        std::size_t used = 0;
        const auto v = std::stoul(std::string(value), &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::domain_error("bad header value " + std::string(key) + "=" + std::string(value));
    }
}

inline void parse_header_line(std::string_view line, ArrayHeader& h) {
    bool recognised = false;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        if (i == line.size()) break;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
        const auto token = line.substr(i, j - i);
        const auto eq = token.find('=');
        if (eq != std::string_view::npos) {
            const auto key = token.substr(0, eq);
            const auto value = token.substr(eq + 1);
            if (key == "provenance") {
                h.provenance = std::string(trim(line.substr(i + eq + 1)));
                recognised = true;
                break;
            }
            if (key == "n") {
                h.n = parse_count(key, value);
                recognised = true;
            } else if (key == "d") {
                h.d = parse_count(key, value);
                recognised = true;
            } else if (key == "m") {
                h.m = parse_count(key, value);
                recognised = true;
            } else if (key == "base") {
                h.base = static_cast<int>(parse_count(key, value));
                recognised = true;
            } else if (!key.empty()) {
                h.extra[std::string(key)] = std::string(value);
                recognised = true;
            }
        }
        i = j;
    }
    if (!recognised) {
        h.comments.emplace_back(line);
    }
}

// Row as parsed: explicit values, -1 for blanks.
using RawRow = std::vector<int>;

inline RawRow parse_row(std::string_view line, std::size_t line_no) {
    RawRow row;
    std::size_t i = 0;
    while (i < line.size()) {
        const char c = line[i];
        if (c == ' ' || c == '\t' || c == ',' || c == '\r') {
            ++i;
            continue;
        }
        if (c == '-') {
            row.push_back(-1);
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < line.size() && line[j] >= '0' && line[j] <= '9') ++j;
        if (j == i) {
            throw std::domain_error("line " + std::to_string(line_no) + ": unexpected character '" +
                                    std::string(1, c) + "'");
        }
        row.push_back(std::stoi(std::string(line.substr(i, j - i))));
        i = j;
    }
    return row;
}

inline Permutation fill_row(const RawRow& row, int base, std::size_t line_no) {
    const auto n = row.size();
    std::vector<int> values(n);
    std::vector<bool> used(n, false);
    for (std::size_t k = 0; k < n; ++k) {
        if (row[k] < 0) continue;
        const int v = row[k] - base;
        if (v < 0 || static_cast<std::size_t>(v) >= n || used[static_cast<std::size_t>(v)]) {
            throw std::domain_error("line " + std::to_string(line_no) + ": not a permutation");
        }
        used[static_cast<std::size_t>(v)] = true;
        values[k] = v;
    }
    std::size_t next = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (row[k] >= 0) continue;
        while (used[next]) ++next;
        values[k] = static_cast<int>(next);
        used[next] = true;
    }
    return Permutation::from_ints(values);
}

}  // namespace detail

/// Detects 0- vs 1-based input for a set of rows over n symbols.
inline int detect_base(const std::vector<std::vector<int>>& rows, std::size_t n) {
    bool has_zero = false;
    bool has_n = false;
    for (const auto& r : rows) {
        for (int v : r) {
            has_zero = has_zero || v == 0;
            has_n = has_n || v == static_cast<int>(n);
        }
    }
    if (has_zero && has_n) {
        throw std::domain_error("array mixes symbol 0 and symbol n; cannot infer numbering");
    }
    return has_n ? 1 : 0;
}

/// Parses one permutation in 0- or 1-based form.
inline Permutation parse_permutation(std::string_view text) {
    auto row = detail::parse_row(text, 1);
    const int base = detect_base({row}, row.size());
    return detail::fill_row(row, base, 1);
}

inline PermArray read_array(std::istream& in, ArrayHeader* header_out = nullptr) {
    ArrayHeader header;
    std::vector<detail::RawRow> rows;
    std::vector<std::size_t> line_numbers;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = detail::trim(line);
        if (t.empty()) continue;
        if (t.front() == '#') {
            detail::parse_header_line(t.substr(1), header);
            continue;
        }
        rows.push_back(detail::parse_row(t, line_no));
        line_numbers.push_back(line_no);
    }
    std::size_t n = header.n.value_or(rows.empty() ? 0 : rows.front().size());
    if (n == 0) {
        throw std::domain_error("array file has no permutations and no n= header");
    }
    for (std::size_t k = 0; k < rows.size(); ++k) {
        if (rows[k].size() != n) {
            throw std::domain_error("line " + std::to_string(line_numbers[k]) + ": expected " +
                                    std::to_string(n) + " symbols, got " + std::to_string(rows[k].size()));
        }
    }
    const int base = header.base.value_or(detect_base(rows, n));
    PermArray a(n, header.provenance);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        a.add(detail::fill_row(rows[k], base, line_numbers[k]));
    }
    a.set_claimed_d(header.d);
    a.set_restriction_m(header.m);
    if (header_out != nullptr) {
        *header_out = std::move(header);
    }
    return a;
}

inline PermArray read_array_file(const std::string& path, ArrayHeader* header_out = nullptr) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    return read_array(in, header_out);
}

/// Writes the header line followed by `extra` comment lines and the members.
inline void write_array(std::ostream& out, const PermArray& a, const std::vector<std::string>& extra = {}) {
    out << "# n=" << a.n();
    if (a.claimed_d()) out << " d=" << *a.claimed_d();
    if (a.restriction_m()) out << " m=" << *a.restriction_m();
    out << " provenance=" << (a.provenance().empty() ? "unspecified" : a.provenance()) << '\n';
    for (const auto& line : extra) {
        out << "# " << line << '\n';
    }
    for (const auto& p : a) {
        out << p.to_string() << '\n';
    }
}

inline std::string to_text(const PermArray& a, const std::vector<std::string>& extra = {}) {
    std::ostringstream os;
    write_array(os, a, extra);
    return os.str();
}

inline PermArray parse_array(std::string_view text) {
    std::istringstream in{std::string(text)};
    return read_array(in);
}

/// Renders p with the n-m smallest symbols blanked out, 1-based like the
/// published pattern listings.
inline std::string to_pattern(const Permutation& p, std::size_t m) {
    std::string out;
    const auto small = p.size() - m;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i != 0) out.push_back(' ');
        if (p[i] < small) {
            out.push_back('-');
        } else {
            out += std::to_string(p[i] + 1);
        }
    }
    return out;
}

}  // namespace kpa
