#include "povmlab/sets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>

namespace povmlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_raw_piece(const Interval& iv, std::size_t index) {
  if (std::isnan(iv.lo) || std::isnan(iv.hi))
    throw std::invalid_argument("malformed interval at index " + std::to_string(index) +
                                ": NaN endpoint");
  if (!(iv.lo < iv.hi))
    throw std::invalid_argument("malformed interval at index " + std::to_string(index) +
                                ": lo >= hi");
}

// Sorted-list interval algebra shared by LineSet and CircleSet. `tol` merges
// endpoints that coincide up to rounding; 0 keeps the arithmetic exact.
std::vector<Interval> merge_sorted(std::vector<Interval> v, double tol) {
  std::sort(v.begin(), v.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> out;
  for (const auto& iv : v) {
    if (!out.empty() && iv.lo <= out.back().hi + tol)
      out.back().hi = std::max(out.back().hi, iv.hi);
    else
      out.push_back(iv);
  }
  return out;
}

std::vector<Interval> intersect_pieces(const std::vector<Interval>& a,
                                       const std::vector<Interval>& b) {
  std::vector<Interval> out;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    double lo = std::max(a[i].lo, b[j].lo);
    double hi = std::min(a[i].hi, b[j].hi);
    if (lo < hi) out.push_back({lo, hi});
    if (a[i].hi < b[j].hi)
      ++i;
    else
      ++j;
  }
  return out;
}

std::vector<Interval> complement_pieces(const std::vector<Interval>& a, double lo,
                                        double hi) {
  std::vector<Interval> out;
  double cursor = lo;
  for (const auto& iv : a) {
    if (cursor < iv.lo) out.push_back({cursor, iv.lo});
    cursor = iv.hi;
  }
  if (cursor < hi) out.push_back({cursor, hi});
  return out;
}

bool pieces_contain(const std::vector<Interval>& v, double x) {
  auto it = std::upper_bound(v.begin(), v.end(), x,
                             [](double q, const Interval& iv) { return q < iv.lo; });
  if (it == v.begin()) return false;
  --it;
  return x >= it->lo && x < it->hi;
}

double reduce_mod_2pi(double x) {
  double y = std::fmod(x, kTwoPi);
  if (y < 0) y += kTwoPi;
  if (y >= kTwoPi || kTwoPi - y <= kCircleEndpointTol) y = 0.0;
  return y;
}

}  // namespace

// ---------------------------------------------------------------------------
// LineSet

LineSet LineSet::of(std::vector<Interval> raw) {
  for (std::size_t i = 0; i < raw.size(); ++i) check_raw_piece(raw[i], i);
  LineSet s;
  s.pieces_ = merge_sorted(std::move(raw), 0.0);
  return s;
}

bool LineSet::contains(double x) const { return pieces_contain(pieces_, x); }

double LineSet::length() const {
  double total = 0.0;
  for (const auto& iv : pieces_) total += iv.length();
  return total;
}

LineSet LineSet::unite(const LineSet& other) const {
  std::vector<Interval> all = pieces_;
  all.insert(all.end(), other.pieces_.begin(), other.pieces_.end());
  LineSet s;
  s.pieces_ = merge_sorted(std::move(all), 0.0);
  return s;
}

LineSet LineSet::intersect(const LineSet& other) const {
  LineSet s;
  s.pieces_ = intersect_pieces(pieces_, other.pieces_);
  return s;
}

LineSet LineSet::difference(const LineSet& other) const {
  return intersect(other.complement());
}

LineSet LineSet::complement() const {
  LineSet s;
  s.pieces_ = complement_pieces(pieces_, -kInf, kInf);
  return s;
}

// ---------------------------------------------------------------------------
// CircleSet

CircleSet CircleSet::full() {
  CircleSet s;
  s.arcs_ = {{0.0, kTwoPi}};
  return s;
}

CircleSet CircleSet::of(std::vector<Interval> raw) {
  std::vector<Interval> flat;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto& iv = raw[i];
    if (std::isnan(iv.lo) || std::isnan(iv.hi) || std::isinf(iv.lo) || std::isinf(iv.hi))
      throw std::invalid_argument("malformed arc at index " + std::to_string(i) +
                                  ": endpoints must be finite");
    if (iv.hi - iv.lo >= kTwoPi - kCircleEndpointTol && iv.hi > iv.lo)
      return full();
    double a = reduce_mod_2pi(iv.lo);
    double b = reduce_mod_2pi(iv.hi);
    if (std::abs(a - b) <= kCircleEndpointTol)
      throw std::invalid_argument("malformed arc at index " + std::to_string(i) +
                                  ": zero width after mod-2pi reduction");
    if (a < b) {
      flat.push_back({a, b});
    } else {  // wraps through 0: split-at-zero canonical form
      flat.push_back({a, kTwoPi});
      if (b > 0.0) flat.push_back({0.0, b});
    }
  }
  CircleSet s;
  s.arcs_ = merge_sorted(std::move(flat), kCircleEndpointTol);
  for (auto& arc : s.arcs_) arc.hi = std::min(arc.hi, kTwoPi);
  if (s.arcs_.size() == 1 && s.arcs_[0].lo <= kCircleEndpointTol &&
      s.arcs_[0].hi >= kTwoPi - kCircleEndpointTol)
    return full();
  return s;
}

bool CircleSet::contains(double x) const {
  return pieces_contain(arcs_, reduce_mod_2pi(x));
}

double CircleSet::length() const {
  double total = 0.0;
  for (const auto& arc : arcs_) total += arc.length();
  return total;
}

CircleSet CircleSet::unite(const CircleSet& other) const {
  std::vector<Interval> all = arcs_;
  all.insert(all.end(), other.arcs_.begin(), other.arcs_.end());
  CircleSet s;
  s.arcs_ = merge_sorted(std::move(all), kCircleEndpointTol);
  if (s.arcs_.size() == 1 && s.arcs_[0].lo <= kCircleEndpointTol &&
      s.arcs_[0].hi >= kTwoPi - kCircleEndpointTol)
    return full();
  return s;
}

CircleSet CircleSet::intersect(const CircleSet& other) const {
  CircleSet s;
  s.arcs_ = intersect_pieces(arcs_, other.arcs_);
  return s;
}

CircleSet CircleSet::difference(const CircleSet& other) const {
  return intersect(other.complement());
}

CircleSet CircleSet::complement() const {
  CircleSet s;
  s.arcs_ = complement_pieces(arcs_, 0.0, kTwoPi);
  // Drop tolerance-width slivers produced by merged endpoints.
  std::erase_if(s.arcs_, [](const Interval& iv) { return iv.length() <= kCircleEndpointTol; });
  return s;
}

CircleSet CircleSet::shift(double theta) const {
  if (empty()) return {};
  if (*this == full()) return full();
  std::vector<Interval> moved;
  moved.reserve(arcs_.size());
  for (const auto& arc : arcs_) moved.push_back({arc.lo + theta, arc.hi + theta});
  return of(std::move(moved));
}

// ---------------------------------------------------------------------------
// NatSet

NatSet NatSet::of(std::vector<std::uint64_t> members) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  NatSet s;
  s.mode_ = Mode::finite;
  s.members_ = std::move(members);
  return s;
}

NatSet NatSet::cofinite(std::vector<std::uint64_t> excluded) {
  NatSet s = of(std::move(excluded));
  s.mode_ = Mode::cofinite;
  return s;
}

bool NatSet::contains(std::uint64_t n) const {
  bool listed = std::binary_search(members_.begin(), members_.end(), n);
  return mode_ == Mode::finite ? listed : !listed;
}

double NatSet::count() const {
  return mode_ == Mode::finite ? static_cast<double>(members_.size()) : kInf;
}

namespace {

std::vector<std::uint64_t> vec_union(const std::vector<std::uint64_t>& a,
                                     const std::vector<std::uint64_t>& b) {
  std::vector<std::uint64_t> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<std::uint64_t> vec_intersection(const std::vector<std::uint64_t>& a,
                                            const std::vector<std::uint64_t>& b) {
  std::vector<std::uint64_t> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<std::uint64_t> vec_difference(const std::vector<std::uint64_t>& a,
                                          const std::vector<std::uint64_t>& b) {
  std::vector<std::uint64_t> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

NatSet NatSet::unite(const NatSet& other) const {
  using M = Mode;
  if (mode_ == M::finite && other.mode_ == M::finite)
    return of(vec_union(members_, other.members_));
  if (mode_ == M::cofinite && other.mode_ == M::cofinite)
    return cofinite(vec_intersection(members_, other.members_));
  const NatSet& co = mode_ == M::cofinite ? *this : other;
  const NatSet& fin = mode_ == M::cofinite ? other : *this;
  return cofinite(vec_difference(co.members_, fin.members_));
}

NatSet NatSet::intersect(const NatSet& other) const {
  return complement().unite(other.complement()).complement();
}

NatSet NatSet::difference(const NatSet& other) const {
  return intersect(other.complement());
}

NatSet NatSet::complement() const {
  NatSet s = *this;
  s.mode_ = mode_ == Mode::finite ? Mode::cofinite : Mode::finite;
  return s;
}

// ---------------------------------------------------------------------------
// Variant helpers

Domain domain_of(const MeasurableSet& s) {
  if (std::holds_alternative<LineSet>(s)) return Domain::line;
  if (std::holds_alternative<CircleSet>(s)) return Domain::circle;
  return Domain::naturals;
}

MeasurableSet full_set(Domain d) {
  switch (d) {
    case Domain::line: return LineSet::full();
    case Domain::circle: return CircleSet::full();
    case Domain::naturals: return NatSet::full();
  }
  throw std::logic_error("unreachable");
}

bool is_empty(const MeasurableSet& s) {
  return std::visit([](const auto& v) { return v.empty(); }, s);
}

namespace {

void require_same_domain(const MeasurableSet& a, const MeasurableSet& b) {
  if (a.index() != b.index())
    throw DomainMismatchError("set operation on mixed domains");
}

template <typename F>
MeasurableSet binary_op(const MeasurableSet& a, const MeasurableSet& b, F&& f) {
  require_same_domain(a, b);
  return std::visit(
      [&](const auto& lhs) -> MeasurableSet {
        using T = std::decay_t<decltype(lhs)>;
        return f(lhs, std::get<T>(b));
      },
      a);
}

}  // namespace

MeasurableSet set_union(const MeasurableSet& a, const MeasurableSet& b) {
  return binary_op(a, b, [](const auto& x, const auto& y) { return x.unite(y); });
}

MeasurableSet set_intersection(const MeasurableSet& a, const MeasurableSet& b) {
  return binary_op(a, b, [](const auto& x, const auto& y) { return x.intersect(y); });
}

MeasurableSet set_difference(const MeasurableSet& a, const MeasurableSet& b) {
  return binary_op(a, b, [](const auto& x, const auto& y) { return x.difference(y); });
}

MeasurableSet set_complement(const MeasurableSet& a) {
  return std::visit([](const auto& v) -> MeasurableSet { return v.complement(); }, a);
}

bool subset_of(const MeasurableSet& a, const MeasurableSet& b) {
  require_same_domain(a, b);
  return is_empty(set_difference(a, b));
}

namespace {

bool intervals_approx(const std::vector<Interval>& a, const std::vector<Interval>& b,
                      double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i].lo - b[i].lo) > tol || std::abs(a[i].hi - b[i].hi) > tol)
      return false;
  return true;
}

}  // namespace

bool approx_equal(const MeasurableSet& a, const MeasurableSet& b, double tol) {
  if (a.index() != b.index()) return false;
  if (const auto* la = std::get_if<LineSet>(&a))
    return intervals_approx(la->pieces(), std::get<LineSet>(b).pieces(), tol);
  if (const auto* ca = std::get_if<CircleSet>(&a))
    return intervals_approx(ca->arcs(), std::get<CircleSet>(b).arcs(), tol);
  return std::get<NatSet>(a) == std::get<NatSet>(b);
}

void validate_partition(std::span<const MeasurableSet> cells, Domain domain) {
  if (cells.empty()) throw std::invalid_argument("partition is empty");
  MeasurableSet acc = std::visit(
      [](const auto& v) -> MeasurableSet { return std::decay_t<decltype(v)>{}; },
      full_set(domain));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (domain_of(cells[i]) != domain)
      throw DomainMismatchError("partition cell " + std::to_string(i) +
                                " has the wrong domain");
    if (!is_empty(set_intersection(acc, cells[i])))
      throw std::invalid_argument("partition cells are not disjoint (cell " +
                                  std::to_string(i) + ")");
    acc = set_union(acc, cells[i]);
  }
  if (!approx_equal(acc, full_set(domain), kCircleEndpointTol))
    throw std::invalid_argument("partition does not cover the full domain");
}

// ---------------------------------------------------------------------------
// ReferenceMeasure

ReferenceMeasure ReferenceMeasure::weighted_restricted(double scale, double lo, double hi) {
  if (!(scale >= 0) || !(lo < hi))
    throw std::invalid_argument("weighted-restricted measure needs scale >= 0 and lo < hi");
  ReferenceMeasure m(Kind::weighted_restricted);
  m.scale_ = scale;
  m.lo_ = lo;
  m.hi_ = hi;
  return m;
}

Domain ReferenceMeasure::domain() const {
  switch (kind_) {
    case Kind::lebesgue_line:
    case Kind::weighted_restricted: return Domain::line;
    case Kind::lebesgue_circle: return Domain::circle;
    case Kind::counting: return Domain::naturals;
  }
  throw std::logic_error("unreachable");
}

double ReferenceMeasure::operator()(const MeasurableSet& s) const {
  if (domain_of(s) != domain())
    throw DomainMismatchError("measure applied to a set from another domain");
  switch (kind_) {
    case Kind::lebesgue_line: return std::get<LineSet>(s).length();
    case Kind::lebesgue_circle: return std::get<CircleSet>(s).length();
    case Kind::counting: return std::get<NatSet>(s).count();
    case Kind::weighted_restricted:
      return scale_ * std::get<LineSet>(s).intersect(LineSet::interval(lo_, hi_)).length();
  }
  throw std::logic_error("unreachable");
}

double ReferenceMeasure::at_point(double) const {
  return kind_ == Kind::counting ? 1.0 : 0.0;
}

// ---------------------------------------------------------------------------
// Shrinking families

namespace {

void require_count(int count) {
  if (count < 1) throw std::invalid_argument("family count must be >= 1");
}

double family_width(double width, int i, bool geometric) {
  return geometric ? width * std::ldexp(1.0, -(i - 1)) : width / i;
}

}  // namespace

std::vector<MeasurableSet> nested_interval_family(double x, double width, int count,
                                                  bool geometric) {
  require_count(count);
  if (!(width > 0)) throw std::invalid_argument("family width must be positive");
  std::vector<MeasurableSet> out;
  for (int i = 1; i <= count; ++i)
    out.push_back(LineSet::interval(x, x + family_width(width, i, geometric)));
  return out;
}

std::vector<MeasurableSet> escaping_halfline_family(int count, double start, double step) {
  require_count(count);
  if (!(step < 0)) throw std::invalid_argument("escaping half-lines need step < 0");
  std::vector<MeasurableSet> out;
  for (int i = 0; i < count; ++i)
    out.push_back(LineSet::interval(-LineSet::kInf, start + i * step));
  return out;
}

std::vector<MeasurableSet> nat_tail_family(int count) {
  require_count(count);
  std::vector<MeasurableSet> out;
  std::vector<std::uint64_t> head;
  for (int i = 1; i <= count; ++i) {
    head.clear();
    for (std::uint64_t m = 0; m <= static_cast<std::uint64_t>(i); ++m) head.push_back(m);
    out.push_back(NatSet::cofinite(head));
  }
  return out;
}

std::vector<MeasurableSet> shrinking_arc_family(double theta0, double width, int count,
                                                bool geometric) {
  require_count(count);
  if (!(width > 0) || width > kTwoPi)
    throw std::invalid_argument("arc width must lie in (0, 2pi]");
  std::vector<MeasurableSet> out;
  for (int i = 1; i <= count; ++i)
    out.push_back(CircleSet::arc(theta0, theta0 + family_width(width, i, geometric)));
  return out;
}

std::vector<MeasurableSet> shrinking_family(std::string_view kind, double anchor,
                                            double width, int count, bool geometric) {
  if (kind == "nested-interval") return nested_interval_family(anchor, width, count, geometric);
  if (kind == "escaping-halfline") return escaping_halfline_family(count, anchor, -1.0);
  if (kind == "nat-tail") return nat_tail_family(count);
  if (kind == "shrinking-arc") return shrinking_arc_family(anchor, width, count, geometric);
  throw std::invalid_argument("unknown shrinking family kind: " + std::string(kind));
}

// ---------------------------------------------------------------------------
// Printer / parser

namespace {

std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);  // shortest round-trip
  return std::string(buf, res.ptr);
}

std::string intervals_to_string(const std::vector<Interval>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += "∪";  // ∪
    out += "[" + format_number(v[i].lo) + "," + format_number(v[i].hi) + ")";
  }
  return out;
}

struct Cursor {
  std::string_view text;
  std::size_t pos = 0;

  bool done() const { return pos >= text.size(); }
  char peek() const { return done() ? '\0' : text[pos]; }
  bool eat(char c) {
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }
  bool eat(std::string_view s) {
    if (text.substr(pos, s.size()) == s) {
      pos += s.size();
      return true;
    }
    return false;
  }
  void skip_ws() {
    while (!done() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw SetParseError("set syntax error at offset " + std::to_string(pos) + ": " + what);
  }
};

double parse_number(Cursor& c) {
  c.skip_ws();
  if (c.eat("inf") || c.eat("+inf")) return kInf;
  if (c.eat("-inf")) return -kInf;
  const char* begin = c.text.data() + c.pos;
  const char* end = c.text.data() + c.text.size();
  double value = 0.0;
  auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc()) c.fail("expected a number");
  c.pos += static_cast<std::size_t>(res.ptr - begin);
  return value;
}

bool eat_union_separator(Cursor& c) {
  c.skip_ws();
  return c.eat("∪") || c.eat('U') || c.eat('u');
}

std::vector<Interval> parse_interval_list(Cursor& c) {
  std::vector<Interval> out;
  while (true) {
    c.skip_ws();
    if (!c.eat('[') && !c.eat('(')) c.fail("expected '[' or '('");
    double lo = parse_number(c);
    c.skip_ws();
    if (!c.eat(',')) c.fail("expected ','");
    double hi = parse_number(c);
    c.skip_ws();
    if (!c.eat(')')) c.fail("expected ')'");
    out.push_back({lo, hi});
    if (!eat_union_separator(c)) break;
  }
  c.skip_ws();
  if (!c.done()) c.fail("trailing text");
  return out;
}

std::vector<std::uint64_t> parse_nat_list(Cursor& c) {
  std::vector<std::uint64_t> out;
  c.skip_ws();
  if (!c.eat('{')) c.fail("expected '{'");
  c.skip_ws();
  if (c.eat('}')) return out;
  while (true) {
    c.skip_ws();
    const char* begin = c.text.data() + c.pos;
    const char* end = c.text.data() + c.text.size();
    std::uint64_t n = 0;
    auto res = std::from_chars(begin, end, n);
    if (res.ec != std::errc()) c.fail("expected a natural number");
    c.pos += static_cast<std::size_t>(res.ptr - begin);
    out.push_back(n);
    c.skip_ws();
    if (c.eat('}')) break;
    if (!c.eat(',')) c.fail("expected ',' or '}'");
  }
  return out;
}

}  // namespace

std::string to_string(const LineSet& s) {
  return s.empty() ? "∅" : intervals_to_string(s.pieces());
}

std::string to_string(const CircleSet& s) {
  return s.empty() ? "circ:∅" : "circ:" + intervals_to_string(s.arcs());
}

std::string to_string(const NatSet& s) {
  std::string body = "{";
  const auto& m = s.members();
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i) body += ",";
    body += std::to_string(m[i]);
  }
  body += "}";
  return s.mode() == NatSet::Mode::cofinite ? "nat:co" + body : "nat:" + body;
}

std::string to_string(const MeasurableSet& s) {
  return std::visit([](const auto& v) { return to_string(v); }, s);
}

MeasurableSet parse_set(std::string_view text) {
  Cursor c{text};
  c.skip_ws();
  if (c.eat("circ:")) {
    c.skip_ws();
    if (c.eat("∅") || c.eat("empty")) return CircleSet{};
    return CircleSet::of(parse_interval_list(c));
  }
  if (c.eat("nat:")) {
    c.skip_ws();
    bool co = c.eat("co");
    auto members = parse_nat_list(c);
    c.skip_ws();
    if (!c.done()) c.fail("trailing text");
    return co ? NatSet::cofinite(std::move(members)) : NatSet::of(std::move(members));
  }
  if (c.eat("∅") || c.eat("empty")) return LineSet{};
  return LineSet::of(parse_interval_list(c));
}

}  // namespace povmlab
