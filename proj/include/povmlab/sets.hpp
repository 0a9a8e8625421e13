#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <stdexcept>
#include <variant>
#include <vector>

namespace povmlab {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Endpoint-coincidence tolerance for circle arcs (mod-2pi reduction
/// introduces rounding; line endpoints stay exact).
inline constexpr double kCircleEndpointTol = 1e-12;

struct SetParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainMismatchError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Half-open interval [lo, hi). Endpoints may be +-infinity on the line.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
  bool operator==(const Interval&) const = default;
};

/// Finite union of disjoint half-open intervals on the real line,
/// canonical: sorted, pairwise disjoint, no two touching.
class LineSet {
public:
  LineSet() = default;

  /// Canonicalizes a raw interval list. Throws std::invalid_argument naming
  /// the index of any malformed piece (lo >= hi, or NaN endpoint).
  static LineSet of(std::vector<Interval> raw);
  static LineSet interval(double lo, double hi) { return of({{lo, hi}}); }
  static LineSet full() { return interval(-kInf, kInf); }

  const std::vector<Interval>& pieces() const { return pieces_; }
  bool empty() const { return pieces_.empty(); }
  bool contains(double x) const;
  /// Lebesgue measure; +infinity for unbounded sets.
  double length() const;

  LineSet unite(const LineSet& other) const;
  LineSet intersect(const LineSet& other) const;
  LineSet difference(const LineSet& other) const;
  LineSet complement() const;
  bool subset_of(const LineSet& other) const { return difference(other).empty(); }

  bool operator==(const LineSet&) const = default;

  static constexpr double kInf = std::numeric_limits<double>::infinity();

private:
  std::vector<Interval> pieces_;
};

/// Finite union of disjoint half-open arcs inside [0, 2pi), canonical with
/// split-at-zero form: an arc never crosses 0, so wrapping inputs are stored
/// as two pieces.
class CircleSet {
public:
  CircleSet() = default;

  /// Raw arcs are reduced mod 2pi. A piece whose reduced end lands at or
  /// before its start wraps through zero and is split; a piece of width
  /// >= 2pi is the full circle. Zero-width pieces are rejected with the
  /// offending index.
  static CircleSet of(std::vector<Interval> raw);
  static CircleSet arc(double a, double b) { return of({{a, b}}); }
  static CircleSet full();

  const std::vector<Interval>& arcs() const { return arcs_; }
  bool empty() const { return arcs_.empty(); }
  bool contains(double x) const;
  double length() const;

  CircleSet unite(const CircleSet& other) const;
  CircleSet intersect(const CircleSet& other) const;
  CircleSet difference(const CircleSet& other) const;
  CircleSet complement() const;
  bool subset_of(const CircleSet& other) const { return difference(other).empty(); }

  /// Rotation by theta (addition mod 2pi), re-canonicalized.
  CircleSet shift(double theta) const;

  bool operator==(const CircleSet&) const = default;

private:
  std::vector<Interval> arcs_;
};

/// Finite or cofinite subset of the naturals.
class NatSet {
public:
  enum class Mode { finite, cofinite };

  NatSet() = default;  // empty

  static NatSet of(std::vector<std::uint64_t> members);
  static NatSet singleton(std::uint64_t n) { return of({n}); }
  /// Complement of a finite set: N \ excluded.
  static NatSet cofinite(std::vector<std::uint64_t> excluded);
  static NatSet full() { return cofinite({}); }

  Mode mode() const { return mode_; }
  /// The stored finite list: the set itself (finite) or its complement (cofinite).
  const std::vector<std::uint64_t>& members() const { return members_; }
  bool empty() const { return mode_ == Mode::finite && members_.empty(); }
  bool contains(std::uint64_t n) const;
  /// Counting measure; +infinity when cofinite.
  double count() const;

  NatSet unite(const NatSet& other) const;
  NatSet intersect(const NatSet& other) const;
  NatSet difference(const NatSet& other) const;
  NatSet complement() const;
  bool subset_of(const NatSet& other) const { return difference(other).empty(); }

  bool operator==(const NatSet&) const = default;

private:
  Mode mode_ = Mode::finite;
  std::vector<std::uint64_t> members_;  // strictly sorted
};

enum class Domain { line, circle, naturals };

using MeasurableSet = std::variant<LineSet, CircleSet, NatSet>;

Domain domain_of(const MeasurableSet& s);
MeasurableSet full_set(Domain d);
bool is_empty(const MeasurableSet& s);

/// Set algebra on the type-erased representation. Mixing domains throws
/// DomainMismatchError.
MeasurableSet set_union(const MeasurableSet& a, const MeasurableSet& b);
MeasurableSet set_intersection(const MeasurableSet& a, const MeasurableSet& b);
MeasurableSet set_difference(const MeasurableSet& a, const MeasurableSet& b);
MeasurableSet set_complement(const MeasurableSet& a);
bool subset_of(const MeasurableSet& a, const MeasurableSet& b);

/// Endpoint-wise comparison with tolerance; exact structural equality
/// otherwise (piece counts and nat members must agree).
bool approx_equal(const MeasurableSet& a, const MeasurableSet& b, double tol);

/// Throws std::invalid_argument unless the sets are pairwise disjoint and
/// their union is the full domain.
void validate_partition(std::span<const MeasurableSet> cells, Domain domain);

/// Reference measure nu for absolute-continuity fits.
class ReferenceMeasure {
public:
  enum class Kind { lebesgue_line, lebesgue_circle, counting, weighted_restricted };

  static ReferenceMeasure lebesgue_line() { return ReferenceMeasure(Kind::lebesgue_line); }
  static ReferenceMeasure lebesgue_circle() { return ReferenceMeasure(Kind::lebesgue_circle); }
  static ReferenceMeasure counting() { return ReferenceMeasure(Kind::counting); }
  /// nu(Delta) = scale * |Delta intersect [lo, hi]|.
  static ReferenceMeasure weighted_restricted(double scale, double lo, double hi);

  Kind kind() const { return kind_; }
  double scale() const { return scale_; }
  Domain domain() const;

  /// May return +infinity (e.g. Lebesgue measure of a half-line).
  double operator()(const MeasurableSet& s) const;
  /// Measure of the singleton {x}: 0 for the absolutely continuous kinds,
  /// 1 for counting.
  double at_point(double x) const;

private:
  explicit ReferenceMeasure(Kind k) : kind_(k) {}
  Kind kind_;
  double scale_ = 1.0;
  double lo_ = 0.0, hi_ = 0.0;
};

// Canonical shrinking families. Counts must be >= 1.

/// [x, x + w/i), i = 1..count (w / 2^(i-1) when geometric). Shrinks to the
/// point probe {x}; under any atomless kernel this is the (0, w/i) family.
std::vector<MeasurableSet> nested_interval_family(double x, double width, int count,
                                                  bool geometric = false);
/// (-inf, start + (i-1)*step), i = 1..count. Defaults give (-inf, -i).
std::vector<MeasurableSet> escaping_halfline_family(int count, double start = -1.0,
                                                    double step = -1.0);
/// {m : m > i}, i = 1..count.
std::vector<MeasurableSet> nat_tail_family(int count);
/// Arcs [theta0, theta0 + w/i) mod 2pi (geometric: w / 2^(i-1)).
std::vector<MeasurableSet> shrinking_arc_family(double theta0, double width, int count,
                                                bool geometric = false);
/// Dispatch by kind name: nested-interval | escaping-halfline | nat-tail |
/// shrinking-arc. Unknown kind throws std::invalid_argument.
std::vector<MeasurableSet> shrinking_family(std::string_view kind, double anchor,
                                            double width, int count, bool geometric = false);

/// Canonical text form: "[0,1)∪[2,inf)", "circ:[0,3.14)", "nat:{0,1,2}",
/// "nat:co{0}", empty sets print as "∅" / "nat:{}". Round-trips through
/// parse_set exactly.
std::string to_string(const MeasurableSet& s);
std::string to_string(const LineSet& s);
std::string to_string(const CircleSet& s);
std::string to_string(const NatSet& s);

/// Inverse of to_string; also accepts 'U'/'u' as the union separator and
/// '(' for left brackets. Throws SetParseError.
MeasurableSet parse_set(std::string_view text);

}  // namespace povmlab
