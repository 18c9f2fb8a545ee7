// Run configuration: a small TOML-style key-value format (sections, strings,
// numbers, booleans, flat arrays) that round-trips parse -> print -> parse
// byte-identically, plus the typed RunConfig consumed by the CLI verbs.
#ifndef FBLAB_CONFIG_HPP
#define FBLAB_CONFIG_HPP

#include <cctype>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fblab/poly.hpp"
#include "fblab/solver.hpp"

namespace fblab {

struct ConfigValue {
    enum class Kind { string, number, boolean, array } kind = Kind::string;
    std::string str;
    double num = 0.0;
    bool flag = false;
    std::vector<double> arr;
};

// Sections in file order, keys in file order within each section.
struct ConfigDoc {
    std::vector<std::pair<std::string, std::vector<std::pair<std::string, ConfigValue>>>> sections;

    const ConfigValue* find(const std::string& section, const std::string& key) const {
        for (const auto& [sname, keys] : sections)
            if (sname == section)
                for (const auto& [k, v] : keys)
                    if (k == key) return &v;
        return nullptr;
    }
    double number(const std::string& s, const std::string& k, double dflt) const {
        const ConfigValue* v = find(s, k);
        return v && v->kind == ConfigValue::Kind::number ? v->num : dflt;
    }
    std::string text(const std::string& s, const std::string& k, const std::string& dflt = "") const {
        const ConfigValue* v = find(s, k);
        return v && v->kind == ConfigValue::Kind::string ? v->str : dflt;
    }
    std::vector<double> array(const std::string& s, const std::string& k) const {
        const ConfigValue* v = find(s, k);
        return v && v->kind == ConfigValue::Kind::array ? v->arr : std::vector<double>{};
    }
};

namespace config_detail {
inline std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}
inline std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
} // namespace config_detail

inline ConfigDoc parse_config(const std::string& text) {
    using config_detail::trim;
    ConfigDoc doc;
    std::istringstream is(text);
    std::string line;
    std::string current;
    int lineno = 0;
    auto section_keys = [&doc](const std::string& name)
        -> std::vector<std::pair<std::string, ConfigValue>>& {
        for (auto& [sname, keys] : doc.sections)
            if (sname == name) return keys;
        doc.sections.emplace_back(name, std::vector<std::pair<std::string, ConfigValue>>{});
        return doc.sections.back().second;
    };
    while (std::getline(is, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw std::invalid_argument("config: bad section at line " + std::to_string(lineno));
            current = trim(t.substr(1, t.size() - 2));
            section_keys(current);
            continue;
        }
        size_t eq = t.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("config: missing '=' at line " + std::to_string(lineno));
        std::string key = trim(t.substr(0, eq));
        std::string val = trim(t.substr(eq + 1));
        if (key.empty() || val.empty()) throw std::invalid_argument("config: empty key/value at line " + std::to_string(lineno));
        ConfigValue cv;
        if (val.front() == '"') {
            if (val.size() < 2 || val.back() != '"')
                throw std::invalid_argument("config: unterminated string at line " + std::to_string(lineno));
            cv.kind = ConfigValue::Kind::string;
            cv.str = val.substr(1, val.size() - 2);
        } else if (val.front() == '[') {
            if (val.back() != ']') throw std::invalid_argument("config: unterminated array at line " + std::to_string(lineno));
            cv.kind = ConfigValue::Kind::array;
            std::string inner = val.substr(1, val.size() - 2);
            std::istringstream as(inner);
            std::string item;
            while (std::getline(as, item, ',')) {
                item = trim(item);
                if (item.empty()) continue;
                cv.arr.push_back(std::stod(item));
            }
        } else if (val == "true" || val == "false") {
            cv.kind = ConfigValue::Kind::boolean;
            cv.flag = val == "true";
        } else {
            cv.kind = ConfigValue::Kind::number;
            size_t pos = 0;
            cv.num = std::stod(val, &pos);
            if (pos != val.size()) throw std::invalid_argument("config: bad number '" + val + "' at line " + std::to_string(lineno));
        }
        section_keys(current).emplace_back(key, cv);
    }
    return doc;
}

inline std::string print_config(const ConfigDoc& doc) {
    using config_detail::fmt_num;
    std::ostringstream os;
    bool first = true;
    for (const auto& [sname, keys] : doc.sections) {
        if (!first) os << "\n";
        first = false;
        os << "[" << sname << "]\n";
        for (const auto& [k, v] : keys) {
            os << k << " = ";
            switch (v.kind) {
                case ConfigValue::Kind::string: os << '"' << v.str << '"'; break;
                case ConfigValue::Kind::number: os << fmt_num(v.num); break;
                case ConfigValue::Kind::boolean: os << (v.flag ? "true" : "false"); break;
                case ConfigValue::Kind::array: {
                    os << "[";
                    for (size_t i = 0; i < v.arr.size(); ++i)
                        os << (i ? ", " : "") << fmt_num(v.arr[i]);
                    os << "]";
                    break;
                }
            }
            os << "\n";
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
struct RunConfig {
    // problem block
    int n = 1;
    int res = 129;
    double a = 0.0;
    std::string constraint = "thin";
    std::string obstacle_text = "zero";   // "zero" or a polynomial literal
    std::string boundary_text;            // polynomial literal, required for solve
    double tol = -1.0;
    int max_sweeps = 50000;
    double omega = 1.8;
    // diagnostics block
    std::vector<std::vector<double>> centers;
    double radii_r0 = 0.04, radii_ratio = 1.25, radii_cap = 0.8;
    std::vector<double> lambdas;
    // scan block
    double scan_spacing = 0.1, scan_extent = 0.6;
    // kernel block
    double kernel_beta = 1.0;
    // misc
    uint64_t seed = 0;
    int threads = 1;
    std::string raw_text;

    static RunConfig from_text(const std::string& text) {
        RunConfig rc;
        rc.raw_text = text;
        ConfigDoc doc = parse_config(text);
        rc.n = static_cast<int>(doc.number("problem", "n", 1));
        rc.res = static_cast<int>(doc.number("problem", "res", 129));
        rc.a = doc.number("problem", "a", 0.0);
        rc.constraint = doc.text("problem", "constraint_set", "thin");
        rc.obstacle_text = doc.text("problem", "obstacle", "zero");
        rc.boundary_text = doc.text("problem", "boundary", "");
        rc.tol = doc.number("problem", "tol", -1.0);
        rc.max_sweeps = static_cast<int>(doc.number("problem", "max_sweeps", 50000));
        rc.omega = doc.number("problem", "omega", 1.8);
        rc.radii_r0 = doc.number("diagnostics", "r0", 0.04);
        rc.radii_ratio = doc.number("diagnostics", "ratio", 1.25);
        rc.radii_cap = doc.number("diagnostics", "cap", 0.8);
        rc.lambdas = doc.array("diagnostics", "lambdas");
        // centers: flat array [x1,x2, x1,x2, ...] or per-axis for n=1
        std::vector<double> flat = doc.array("diagnostics", "centers");
        int stride = rc.n == 1 ? 1 : 2;
        for (size_t i = 0; i + stride <= flat.size(); i += stride) {
            std::vector<double> c{flat[i], stride == 2 ? flat[i + 1] : 0.0};
            rc.centers.push_back(c);
        }
        std::vector<double> bc = doc.array("blowup", "centers");
        if (!bc.empty() && rc.centers.empty())
            for (size_t i = 0; i + stride <= bc.size(); i += stride)
                rc.centers.push_back({bc[i], stride == 2 ? bc[i + 1] : 0.0});
        rc.scan_spacing = doc.number("scan", "spacing", 0.1);
        rc.scan_extent = doc.number("scan", "extent", 0.6);
        rc.kernel_beta = doc.number("kernel", "beta", 1.0);
        rc.seed = static_cast<uint64_t>(doc.number("run", "seed", 0));
        rc.threads = static_cast<int>(doc.number("run", "threads", 1));
        return rc;
    }

    ObstacleSpec to_obstacle_spec() const {
        ObstacleSpec spec;
        if (constraint == "thin")
            spec.constraint_set = ConstraintSet::thin;
        else if (constraint == "very_thin")
            spec.constraint_set = ConstraintSet::very_thin;
        else
            throw std::invalid_argument("config: constraint_set must be thin or very_thin");
        if (obstacle_text != "zero" && !obstacle_text.empty()) {
            MultiPoly phi = parse_poly(obstacle_text);
            spec.obstacle = [phi](const Point& p) { return phi.eval(p); };
        }
        if (boundary_text.empty())
            throw std::invalid_argument("config: [problem] boundary polynomial is required");
        MultiPoly g = parse_poly(boundary_text);
        spec.boundary = [g](const Point& p) { return g.eval(p); };
        return spec;
    }
};

} // namespace fblab

#endif
