#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace povmlab {

/// Insertion-ordered JSON value with a fixed serialization: floating values
/// always print with 17 significant digits, keys keep insertion order, so a
/// report built from the same inputs dumps byte-identically.
class Json {
public:
  Json() : kind_(Kind::null) {}

  static Json object();
  static Json array();
  static Json str(std::string s);
  static Json num(double v);
  static Json integer(std::int64_t v);
  static Json boolean(bool b);
  static Json null();
  static Json num_array(std::span<const double> values);

  Json& set(const std::string& key, Json value);  // objects
  Json& push(Json value);                         // arrays

  std::string dump(int indent = 2) const;

private:
  enum class Kind { null, object, array, string, number, integer, boolean };
  Kind kind_;
  std::string string_;
  double number_ = 0.0;
  std::int64_t integer_ = 0;
  bool boolean_ = false;
  std::vector<std::pair<std::string, Json>> members_;
  std::vector<Json> items_;

  void write(std::string& out, int indent, int depth) const;
};

/// Serialize a floating value with 17 significant digits (round-trip safe).
std::string format_double_17(double v);

void write_text_file(const std::string& path, const std::string& contents);

/// CSV export of a norm sequence: "index,norm" rows.
std::string norms_csv(std::span<const double> norms);

}  // namespace povmlab
