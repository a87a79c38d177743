#include "json_writer.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

namespace ces::cli {

namespace {

void indent(std::ostream& out, int depth) {
  for (int i = 0; i < depth; ++i) out << "  ";
}

void write_value(std::ostream& out, const Document& v, int depth) {
  switch (v.type()) {
    case Document::value_t::object: {
      if (v.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out << ",\n";
        first = false;
        indent(out, depth + 1);
        out << Document(it.key()).dump() << ": ";
        write_value(out, it.value(), depth + 1);
      }
      out << '\n';
      indent(out, depth);
      out << '}';
      return;
    }
    case Document::value_t::array: {
      if (v.empty()) {
        out << "[]";
        return;
      }
      out << "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) out << ",\n";
        indent(out, depth + 1);
        write_value(out, v[i], depth + 1);
      }
      out << '\n';
      indent(out, depth);
      out << ']';
      return;
    }
    case Document::value_t::number_float:
      out << format_double(v.get<double>());
      return;
    default:
      out << v.dump();
      return;
  }
}

}  // namespace

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_json(std::ostream& out, const Document& doc) {
  write_value(out, doc, 0);
  out << '\n';
}

}  // namespace ces::cli
