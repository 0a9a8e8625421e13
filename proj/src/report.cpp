#include "povmlab/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace povmlab {

std::string format_double_17(double v) {
  if (std::isnan(v)) return "null";
  if (std::isinf(v)) return v > 0 ? "1e999" : "-1e999";  // JSON has no infinity
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Json Json::object() {
  Json j;
  j.kind_ = Kind::object;
  return j;
}

Json Json::array() {
  Json j;
  j.kind_ = Kind::array;
  return j;
}

Json Json::str(std::string s) {
  Json j;
  j.kind_ = Kind::string;
  j.string_ = std::move(s);
  return j;
}

Json Json::num(double v) {
  Json j;
  j.kind_ = Kind::number;
  j.number_ = v;
  return j;
}

Json Json::integer(std::int64_t v) {
  Json j;
  j.kind_ = Kind::integer;
  j.integer_ = v;
  return j;
}

Json Json::boolean(bool b) {
  Json j;
  j.kind_ = Kind::boolean;
  j.boolean_ = b;
  return j;
}

Json Json::null() { return Json(); }

Json Json::num_array(std::span<const double> values) {
  Json j = array();
  for (double v : values) j.push(num(v));
  return j;
}

Json& Json::set(const std::string& key, Json value) {
  if (kind_ != Kind::object) throw std::logic_error("Json::set on a non-object");
  members_.emplace_back(key, std::move(value));
  return *this;
}

Json& Json::push(Json value) {
  if (kind_ != Kind::array) throw std::logic_error("Json::push on a non-array");
  items_.push_back(std::move(value));
  return *this;
}

namespace {

void escape_into(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

void pad(std::string& out, int indent, int depth) {
  if (indent > 0) {
    out += '\n';
    out.append(static_cast<std::size_t>(indent) * depth, ' ');
  }
}

}  // namespace

void Json::write(std::string& out, int indent, int depth) const {
  switch (kind_) {
    case Kind::null: out += "null"; break;
    case Kind::string: escape_into(out, string_); break;
    case Kind::number: out += format_double_17(number_); break;
    case Kind::integer: out += std::to_string(integer_); break;
    case Kind::boolean: out += boolean_ ? "true" : "false"; break;
    case Kind::object: {
      if (members_.empty()) {
        out += "{}";
        break;
      }
      out += '{';
      for (std::size_t i = 0; i < members_.size(); ++i) {
        pad(out, indent, depth + 1);
        escape_into(out, members_[i].first);
        out += indent > 0 ? ": " : ":";
        members_[i].second.write(out, indent, depth + 1);
        if (i + 1 < members_.size()) out += ',';
      }
      pad(out, indent, depth);
      out += '}';
      break;
    }
    case Kind::array: {
      if (items_.empty()) {
        out += "[]";
        break;
      }
      out += '[';
      for (std::size_t i = 0; i < items_.size(); ++i) {
        pad(out, indent, depth + 1);
        items_[i].write(out, indent, depth + 1);
        if (i + 1 < items_.size()) out += ',';
      }
      pad(out, indent, depth);
      out += ']';
      break;
    }
  }
}

std::string Json::dump(int indent) const {
  std::string out;
  write(out, indent, 0);
  out += '\n';
  return out;
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << contents;
  if (!f) throw std::runtime_error("failed while writing " + path);
}

std::string norms_csv(std::span<const double> norms) {
  std::string out = "index,norm\n";
  for (std::size_t i = 0; i < norms.size(); ++i)
    out += std::to_string(i + 1) + "," + format_double_17(norms[i]) + "\n";
  return out;
}

}  // namespace povmlab
