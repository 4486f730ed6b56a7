#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "chnc/error.hpp"

namespace chnc {

using json = nlohmann::ordered_json;

namespace detail {

inline void dump_value(const json& v, std::string& out, int indent, int depth) {
  const auto newline = [&](int d) {
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (v.type()) {
    case json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += json(it.key()).dump();
        out += ": ";
        dump_value(it.value(), out, indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& e : v) flat = flat && !e.is_structured();
      out += '[';
      bool first = true;
      for (const auto& e : v) {
        if (!first) out += flat ? ", " : ",";
        first = false;
        if (!flat) newline(depth + 1);
        dump_value(e, out, indent, depth + 1);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case json::value_t::number_float: {
      const double d = v.get<double>();
      require(std::isfinite(d), "cannot serialize a non-finite number");
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", d);
      out += buf;
      // Keep the value a float when read back.
      if (std::string_view(buf).find_first_of(".eEn") == std::string_view::npos) out += ".0";
      return;
    }
    default:
      out += v.dump();
  }
}

}  // namespace detail

/// Pretty JSON with every floating-point number printed to 17 significant
/// digits, so output bytes depend only on the values.
inline std::string dump_json(const json& v, int indent = 2) {
  std::string out;
  detail::dump_value(v, out, indent, 0);
  out += '\n';
  return out;
}

inline void write_json(const json& v, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) data_error("cannot write " + path);
  out << dump_json(v);
  if (!out) data_error("write failed: " + path);
}

inline json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) data_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    data_error(path + ": invalid JSON (" + e.what() + ")");
  }
}

}  // namespace chnc
