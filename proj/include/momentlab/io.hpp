#pragma once

// Flat key=value configuration, CSV emission and parsing, and run manifests.

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "error.hpp"
#include "moment.hpp"

#ifndef MOMENTLAB_VERSION
#define MOMENTLAB_VERSION "0.1.0"
#endif

namespace momentlab::io {

// ---------------------------------------------------------------------------
// Scalars
// ---------------------------------------------------------------------------

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// 17 significant digits, so the text round-trips to the same double.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline bool parse_double(std::string_view s, double& out) {
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
    return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

/// Integer literal, or a floating literal with an exact integral value ("3e8").
inline bool parse_int(std::string_view s, i64& out) {
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
    if (r.ec == std::errc() && r.ptr == s.data() + s.size()) return true;
    double d;
    if (!parse_double(s, d) || d != std::floor(d) || std::fabs(d) > 9.007199254740992e15) return false;
    out = static_cast<i64>(d);
    return true;
}

inline bool parse_bool(std::string_view s, bool& out) {
    if (s == "true" || s == "1" || s == "yes") return out = true, true;
    if (s == "false" || s == "0" || s == "no") return out = false, true;
    return false;
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct ConfigKey {
    const char* name;
    const char* type;
    std::function<bool(ExperimentConfig&, std::string_view)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

namespace detail {

template <class T>
ConfigKey int_key(const char* name, T ExperimentConfig::*field) {
    return {name, "integer",
            [field](ExperimentConfig& c, std::string_view v) {
                i64 x;
                if (!parse_int(v, x)) return false;
                if constexpr (std::is_unsigned_v<T>) {
                    if (x < 0) return false;
                }
                c.*field = static_cast<T>(x);
                return true;
            },
            [field](const ExperimentConfig& c) { return std::to_string(c.*field); }};
}

inline ConfigKey real_key(const char* name, double ExperimentConfig::*field) {
    return {name, "real",
            [field](ExperimentConfig& c, std::string_view v) { return parse_double(v, c.*field); },
            [field](const ExperimentConfig& c) { return format_double(c.*field); }};
}

}  // namespace detail

/// Every key of ExperimentConfig, in echo order.
inline const std::vector<ConfigKey>& config_keys() {
    using detail::int_key;
    using detail::real_key;
    static const std::vector<ConfigKey> keys = {
        int_key("m1", &ExperimentConfig::m1),
        int_key("m2", &ExperimentConfig::m2),
        int_key("k", &ExperimentConfig::k),
        real_key("eps", &ExperimentConfig::eps),
        int_key("ell_max", &ExperimentConfig::ell_max),
        real_key("c_truncation_tol", &ExperimentConfig::c_truncation_tol),
        {"summation_mode", "pairwise|compensated",
         [](ExperimentConfig& c, std::string_view v) {
             if (v == "pairwise" || v == "deterministic-pairwise") c.summation_mode = SummationMode::Pairwise;
             else if (v == "compensated") c.summation_mode = SummationMode::Compensated;
             else return false;
             return true;
         },
         [](const ExperimentConfig& c) { return std::string(to_string(c.summation_mode)); }},
        int_key("n_max", &ExperimentConfig::n_max),
        int_key("c_max", &ExperimentConfig::c_max),
        real_key("afe_factor", &ExperimentConfig::afe_factor),
        int_key("op_budget", &ExperimentConfig::op_budget),
        {"diagonal_only", "boolean",
         [](ExperimentConfig& c, std::string_view v) { return parse_bool(v, c.diagonal_only); },
         [](const ExperimentConfig& c) { return std::string(c.diagonal_only ? "true" : "false"); }},
        {"provider", "string",
         [](ExperimentConfig& c, std::string_view v) {
             if (v.empty()) return false;
             c.provider = std::string(v);
             return true;
         },
         [](const ExperimentConfig& c) { return c.provider; }},
        int_key("seed", &ExperimentConfig::seed),
        int_key("threads", &ExperimentConfig::threads),
    };
    return keys;
}

inline const ConfigKey* find_key(std::string_view name) {
    for (const auto& k : config_keys())
        if (name == k.name) return &k;
    return nullptr;
}

/// Sets one field from text. line = 0 for command-line flags.
inline void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value, int line = 0) {
    const std::string where = line > 0 ? "line " + std::to_string(line) + ": " : "";
    const ConfigKey* k = find_key(key);
    if (!k) throw Error(Errc::UnknownKey, where + "unknown key '" + std::string(key) + "'");
    if (!k->set(cfg, value))
        throw Error(Errc::TypeError, where + "key '" + std::string(key) + "' expects " + k->type + ", got '" +
                                         std::string(value) + "'");
}

struct ParsedConfig {
    ExperimentConfig cfg;
    std::vector<std::string> given;  // keys set explicitly

    bool is_default(const std::string& key) const {
        for (const auto& g : given)
            if (g == key) return false;
        return true;
    }

    /// key=value for every field; defaulted ones are marked.
    std::string echo() const {
        std::string out;
        for (const auto& k : config_keys()) {
            out += k.name;
            out += '=';
            out += k.get(cfg);
            if (is_default(k.name)) out += "  # default";
            out += '\n';
        }
        return out;
    }
};

/// Flat key=value text with '#' comments. Unknown keys and bad values carry the line number; the
/// result is validated unless the caller overlays more values first.
inline ParsedConfig parse_config_text(std::string_view text, ExperimentConfig base = {}, bool validate = true) {
    ParsedConfig out{std::move(base), {}};
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw Error(Errc::TypeError, "line " + std::to_string(line_no) + ": expected key=value");
        const auto key = trim(line.substr(0, eq));
        set_config_value(out.cfg, key, trim(line.substr(eq + 1)), line_no);
        out.given.emplace_back(key);
    }
    if (validate) out.cfg.validate();
    return out;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoError, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline ParsedConfig parse_config_file(const std::string& path, ExperimentConfig base = {}, bool validate = true) {
    return parse_config_text(read_file(path), std::move(base), validate);
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

inline std::string sha256_hex(std::string_view data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr))
        throw Error(Errc::IoError, "sha256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

struct RunManifest {
    std::string command_line;
    std::vector<std::pair<std::string, std::string>> config;
    std::uint64_t seed = 0;
    std::string version = MOMENTLAB_VERSION;
    double wall_seconds = 0.0;
    std::map<std::string, std::uint64_t> counters;

    void snapshot(const ExperimentConfig& cfg) {
        config.clear();
        for (const auto& k : config_keys()) config.emplace_back(k.name, k.get(cfg));
        seed = cfg.seed;
    }

    /// Reproducible fields only; wall time and counters vary between runs.
    std::string identity() const {
        std::string s = "version=" + version + "\ncommand=" + command_line + "\nseed=" + std::to_string(seed) + "\n";
        for (const auto& [k, v] : config) s += "config." + k + "=" + v + "\n";
        return s;
    }

    std::string hash() const { return sha256_hex(identity()); }

    std::string to_text() const {
        std::string s = "sha256=" + hash() + "\n" + identity();
        s += "wall_seconds=" + format_double(wall_seconds) + "\n";
        for (const auto& [k, v] : counters) s += "counter." + k + "=" + std::to_string(v) + "\n";
        return s;
    }
};

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

using Cell = std::variant<std::string, i64, double>;

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row) {
        if (row.size() != header.size())
            throw Error(Errc::IoError, "row has " + std::to_string(row.size()) + " cells, schema has " +
                                           std::to_string(header.size()));
        rows.push_back(std::move(row));
    }
};

inline std::string cell_text(const Cell& c) {
    if (const auto* s = std::get_if<std::string>(&c)) return *s;
    if (const auto* i = std::get_if<i64>(&c)) return std::to_string(*i);
    return format_double(std::get<double>(c));
}

/// Quoted when the field holds a delimiter, quote, line break, or starts with '#'.
inline std::string csv_quote(const std::string& s) {
    const bool q = s.find_first_of(",\"\r\n") != std::string::npos || (!s.empty() && s.front() == '#');
    if (!q) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

inline std::string manifest_line(const std::string& hash) { return "# manifest sha256=" + hash + "\n"; }

inline std::string emit_csv_string(const CsvTable& t, const std::string& manifest_hash) {
    if (t.header.empty()) throw Error(Errc::IoError, "empty schema");
    std::string out;
    auto put_row = [&](const auto& cells, auto text) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += csv_quote(text(cells[i]));
        }
        out += '\n';
    };
    put_row(t.header, [](const std::string& s) { return s; });
    for (const auto& r : t.rows) {
        if (r.size() != t.header.size()) throw Error(Errc::IoError, "row width does not match schema");
        put_row(r, cell_text);
    }
    out += manifest_line(manifest_hash);
    return out;
}

inline void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::IoError, "cannot write '" + path + "'");
    out << data;
    out.flush();
    if (!out) throw Error(Errc::IoError, "write to '" + path + "' failed");
}

/// Writes the CSV to path and the manifest next to it as path + ".manifest".
inline void emit_csv(const std::string& path, const CsvTable& t, const RunManifest& m) {
    write_file(path, emit_csv_string(t, m.hash()));
    write_file(path + ".manifest", m.to_text());
}

struct ParsedCsv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> comments;  // trailing '#' lines, without the '#'

    std::string manifest_hash() const {
        const std::string tag = " manifest sha256=";
        for (const auto& c : comments)
            if (c.rfind(tag, 0) == 0) return c.substr(tag.size());
        return {};
    }
};

inline ParsedCsv parse_csv(std::string_view text) {
    ParsedCsv out;
    std::size_t i = 0;
    bool have_header = false;
    while (i < text.size()) {
        if (text[i] == '#') {
            const auto nl = text.find('\n', i);
            const auto end = nl == std::string_view::npos ? text.size() : nl;
            out.comments.emplace_back(text.substr(i + 1, end - i - 1));
            i = end + 1;
            continue;
        }
        if (!out.comments.empty()) throw Error(Errc::IoError, "data after trailing comment");
        std::vector<std::string> row;
        std::string field;
        bool done = false;
        while (!done) {
            field.clear();
            if (i < text.size() && text[i] == '"') {
                ++i;
                for (;;) {
                    if (i >= text.size()) throw Error(Errc::IoError, "unterminated quoted field");
                    if (text[i] == '"') {
                        if (i + 1 < text.size() && text[i + 1] == '"') {
                            field += '"';
                            i += 2;
                            continue;
                        }
                        ++i;
                        break;
                    }
                    field += text[i++];
                }
            } else {
                while (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r') field += text[i++];
            }
            row.push_back(field);
            if (i < text.size() && text[i] == ',') {
                ++i;
                continue;
            }
            if (i < text.size() && text[i] == '\r') ++i;
            if (i < text.size() && text[i] != '\n') throw Error(Errc::IoError, "junk after quoted field");
            ++i;
            done = true;
        }
        if (!have_header) {
            out.header = std::move(row);
            have_header = true;
        } else {
            if (row.size() != out.header.size()) throw Error(Errc::IoError, "row width does not match header");
            out.rows.push_back(std::move(row));
        }
    }
    if (!have_header) throw Error(Errc::IoError, "missing header row");
    return out;
}

}  // namespace momentlab::io
