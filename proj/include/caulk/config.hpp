#ifndef CAULK_CONFIG_HPP
#define CAULK_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "caulk/common.hpp"

namespace caulk {

/// Raised for malformed configs and missing keys; maps to exit code 2.
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Line-oriented config tree:
///   key value [value ...]
///   block {
///     ...
///   }
/// '#' starts a comment. Keys may repeat (e.g. layer blocks).
struct ConfigNode {
    std::string name;
    std::vector<std::pair<std::string, std::vector<std::string>>> scalars;
    std::vector<ConfigNode> blocks;

    bool has(const std::string& key) const {
        for (const auto& [k, v] : scalars)
            if (k == key) return true;
        return false;
    }

    bool has_block(const std::string& key) const {
        for (const auto& b : blocks)
            if (b.name == key) return true;
        return false;
    }

    const std::vector<std::string>& values(const std::string& key) const {
        for (const auto& [k, v] : scalars)
            if (k == key) return v;
        throw ConfigError("config: missing key '" + key + "'" +
                          (name.empty() ? "" : " in block '" + name + "'"));
    }

    std::string str(const std::string& key) const {
        const auto& v = values(key);
        if (v.size() != 1)
            throw ConfigError("config: key '" + key + "' expects a single value");
        return v[0];
    }

    std::string str_or(const std::string& key, const std::string& fallback) const {
        return has(key) ? str(key) : fallback;
    }

    double num(const std::string& key) const {
        const std::string s = str(key);
        char* end = nullptr;
        double v = std::strtod(s.c_str(), &end);
        if (end == s.c_str() || *end != '\0')
            throw ConfigError("config: key '" + key + "' has non-numeric value '" + s + "'");
        return v;
    }

    double num_or(const std::string& key, double fallback) const {
        return has(key) ? num(key) : fallback;
    }

    long long integer(const std::string& key) const {
        double v = num(key);
        long long i = (long long)(v);
        if (double(i) != v)
            throw ConfigError("config: key '" + key + "' must be an integer");
        return i;
    }

    long long integer_or(const std::string& key, long long fallback) const {
        return has(key) ? integer(key) : fallback;
    }

    std::uint64_t u64(const std::string& key) const {
        const std::string s = str(key);
        char* end = nullptr;
        unsigned long long v = std::strtoull(s.c_str(), &end, 10);
        if (end == s.c_str() || *end != '\0')
            throw ConfigError("config: key '" + key + "' must be an unsigned integer");
        return v;
    }

    std::vector<double> num_list(const std::string& key) const {
        std::vector<double> out;
        for (const auto& s : values(key)) {
            char* end = nullptr;
            double v = std::strtod(s.c_str(), &end);
            if (end == s.c_str() || *end != '\0')
                throw ConfigError("config: key '" + key + "' has non-numeric entry '" + s + "'");
            out.push_back(v);
        }
        return out;
    }

    std::vector<int> int_list(const std::string& key) const {
        std::vector<int> out;
        for (double v : num_list(key)) {
            int i = int(v);
            if (double(i) != v) throw ConfigError("config: key '" + key + "' must list integers");
            out.push_back(i);
        }
        return out;
    }

    const ConfigNode& block(const std::string& key) const {
        for (const auto& b : blocks)
            if (b.name == key) return b;
        throw ConfigError("config: missing block '" + key + "'" +
                          (name.empty() ? "" : " in block '" + name + "'"));
    }

    std::vector<const ConfigNode*> blocks_named(const std::string& key) const {
        std::vector<const ConfigNode*> out;
        for (const auto& b : blocks)
            if (b.name == key) out.push_back(&b);
        return out;
    }

    void set(const std::string& key, std::vector<std::string> vals) {
        for (auto& [k, v] : scalars)
            if (k == key) {
                v = std::move(vals);
                return;
            }
        scalars.emplace_back(key, std::move(vals));
    }
};

namespace detail {

inline std::string strip_comment(const std::string& line) {
    std::string out;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '#' && (i == 0 || std::isspace((unsigned char)line[i - 1]))) break;
        out += line[i];
    }
    return out;
}

inline std::vector<std::string> tokenize(const std::string& line) {
    std::istringstream is(line);
    std::vector<std::string> toks;
    std::string t;
    while (is >> t) toks.push_back(t);
    return toks;
}

}  // namespace detail

inline ConfigNode parse_config(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    ConfigNode root;
    std::vector<ConfigNode*> stack = {&root};
    while (std::getline(is, line)) {
        ++lineno;
        auto toks = detail::tokenize(detail::strip_comment(line));
        if (toks.empty()) continue;
        if (toks.size() == 1 && toks[0] == "}") {
            if (stack.size() == 1)
                throw ConfigError("config parse: unmatched '}' at line " + std::to_string(lineno));
            stack.pop_back();
            continue;
        }
        if (toks.back() == "{") {
            if (toks.size() != 2)
                throw ConfigError("config parse: block header must be 'name {' at line " +
                                  std::to_string(lineno));
            stack.back()->blocks.push_back(ConfigNode{toks[0], {}, {}});
            stack.push_back(&stack.back()->blocks.back());
            continue;
        }
        if (toks.size() < 2)
            throw ConfigError("config parse: key '" + toks[0] + "' without value at line " +
                              std::to_string(lineno));
        std::vector<std::string> vals(toks.begin() + 1, toks.end());
        stack.back()->scalars.emplace_back(toks[0], std::move(vals));
    }
    if (stack.size() != 1) throw ConfigError("config parse: unterminated block at end of input");
    return root;
}

/// Canonical re-serialization: normalized whitespace, original order.
inline void write_config(const ConfigNode& node, std::ostream& os, int indent = 0) {
    std::string pad(std::size_t(indent) * 2, ' ');
    for (const auto& [k, vals] : node.scalars) {
        os << pad << k;
        for (const auto& v : vals) os << " " << v;
        os << "\n";
    }
    for (const auto& b : node.blocks) {
        os << pad << b.name << " {\n";
        write_config(b, os, indent + 1);
        os << pad << "}\n";
    }
}

inline std::string config_text(const ConfigNode& node) {
    std::ostringstream os;
    write_config(node, os);
    return os.str();
}

/// Content digest of the canonical form; recorded in every output.
inline std::string config_hash(const ConfigNode& node) { return hex64(fnv1a64(config_text(node))); }

/// Applies a dotted-path override `a.b.key=v1,v2` before hashing. Missing
/// intermediate blocks are created; an existing key is replaced.
inline void apply_override(ConfigNode& root, const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("--set expects key=value, got '" + assignment + "'");
    std::string path = assignment.substr(0, eq);
    std::string value = assignment.substr(eq + 1);

    std::vector<std::string> segs;
    std::size_t start = 0;
    while (true) {
        auto dot = path.find('.', start);
        if (dot == std::string::npos) {
            segs.push_back(path.substr(start));
            break;
        }
        segs.push_back(path.substr(start, dot - start));
        start = dot + 1;
    }
    for (const auto& s : segs)
        if (s.empty()) throw ConfigError("--set path has empty segment: '" + path + "'");

    ConfigNode* node = &root;
    for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
        ConfigNode* next = nullptr;
        for (auto& b : node->blocks)
            if (b.name == segs[i]) {
                next = &b;
                break;
            }
        if (!next) {
            node->blocks.push_back(ConfigNode{segs[i], {}, {}});
            next = &node->blocks.back();
        }
        node = next;
    }
    std::vector<std::string> vals;
    start = 0;
    while (true) {
        auto comma = value.find(',', start);
        if (comma == std::string::npos) {
            vals.push_back(value.substr(start));
            break;
        }
        vals.push_back(value.substr(start, comma - start));
        start = comma + 1;
    }
    if (vals.empty() || (vals.size() == 1 && vals[0].empty()))
        throw ConfigError("--set has empty value for '" + path + "'");
    node->set(segs.back(), std::move(vals));
}

}  // namespace caulk

#endif  // CAULK_CONFIG_HPP
