#pragma once

#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <string>

#include <json.hpp>

#include "orient/error.hpp"

namespace orient::detail {

using nlohmann::json;
using nlohmann::ordered_json;

/// Pretty printer with every floating-point number at 17 significant digits.
template <class Json>
void dump_json(const Json& j, std::string& out, int depth = 0) {
    const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
    const std::string close(static_cast<std::size_t>(2 * depth), ' ');
    if (j.is_number_float()) {
        const double x = j.template get<double>();
        if (!std::isfinite(x)) {
            out += "null";
            return;
        }
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        out += buf;
    } else if (j.is_object()) {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ",\n";
            first = false;
            out += pad + Json(it.key()).dump() + ": ";
            dump_json(it.value(), out, depth + 1);
        }
        out += "\n" + close + "}";
    } else if (j.is_array()) {
        if (j.empty()) {
            out += "[]";
            return;
        }
        bool flat = true;
        for (const auto& v : j) flat = flat && v.is_primitive();
        out += flat ? "[" : "[\n";
        bool first = true;
        for (const auto& v : j) {
            if (!first) out += flat ? ", " : ",\n";
            first = false;
            if (!flat) out += pad;
            dump_json(v, out, depth + 1);
        }
        out += flat ? "]" : "\n" + close + "]";
    } else {
        out += j.dump();
    }
}

template <class Json>
std::string dump_json(const Json& j) {
    std::string out;
    dump_json(j, out);
    out += "\n";
    return out;
}

inline json parse_json(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(origin + ": " + e.what());
    }
}

/// Rejects keys outside `allowed` and reports the first one found.
inline void expect_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) {
        throw ParseError(where + ": expected an object");
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) {
            if (it.key() == a) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            throw ParseError(where + ": unknown field '" + it.key() + "'");
        }
    }
}

template <class T>
T get_field(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) {
        throw ParseError(where + ": missing field '" + key + "'");
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(where + "/" + key + ": " + e.what());
    }
}

template <class T>
T get_field_or(const json& j, const char* key, T fallback, const std::string& where) {
    return j.contains(key) ? get_field<T>(j, key, where) : fallback;
}

}  // namespace orient::detail
