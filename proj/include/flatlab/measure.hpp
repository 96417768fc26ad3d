#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <boost/dynamic_bitset.hpp>

namespace flatlab {

enum class Geometry { Interval, Grid, Custom };

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Neumaier-compensated sum.
class CompensatedSum {
 public:
  void add(double v) noexcept;
  double value() const noexcept { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

/// Finite atomic measure space. Cheap to copy: the atom data is shared and
/// immutable once built.
class MeasureSpace {
 public:
  /// n atoms of weight 1/n on [0,1]; atom i is centred at (i+0.5)/n.
  static MeasureSpace uniform_interval(std::size_t n);
  /// nx*ny atoms on [0,1]^2. Atom index is iy*nx + ix, so a row of constant
  /// y is contiguous.
  static MeasureSpace product_grid(std::size_t nx, std::size_t ny);
  /// Arbitrary positive weights, atom i centred at i.
  static MeasureSpace from_weights(std::vector<double> weights);

  std::size_t size() const noexcept { return data_->weights.size(); }
  double weight(std::size_t i) const { return data_->weights[i]; }
  std::span<const double> weights() const noexcept { return data_->weights; }
  double total_measure() const noexcept { return data_->total; }
  double min_weight() const noexcept { return data_->min_weight; }

  Geometry geometry() const noexcept { return data_->geometry; }
  Point center(std::size_t i) const { return data_->centers[i]; }

  // Grid only.
  std::size_t nx() const noexcept { return data_->nx; }
  std::size_t ny() const noexcept { return data_->ny; }
  std::size_t column_of(std::size_t i) const;
  std::size_t row_of(std::size_t i) const;
  std::size_t atom_at(std::size_t ix, std::size_t iy) const;

  /// 64-bit content hash over geometry, dimensions and weight bits.
  std::uint64_t fingerprint() const noexcept { return data_->fingerprint; }
  std::string fingerprint_hex() const;
  std::string describe() const;

  friend bool operator==(const MeasureSpace& a, const MeasureSpace& b) noexcept {
    return a.data_ == b.data_ || a.data_->fingerprint == b.data_->fingerprint;
  }

 private:
  struct Data {
    Geometry geometry = Geometry::Custom;
    std::vector<double> weights;
    std::vector<Point> centers;
    std::size_t nx = 0;
    std::size_t ny = 0;
    double total = 0.0;
    double min_weight = 0.0;
    std::uint64_t fingerprint = 0;
  };

  explicit MeasureSpace(std::shared_ptr<const Data> d) : data_(std::move(d)) {}
  static MeasureSpace finish(Data d);

  std::shared_ptr<const Data> data_;
};

/// Throws SpaceMismatch unless a == b.
void require_same_space(const MeasureSpace& a, const MeasureSpace& b,
                        const char* what);

/// A subset of atoms. Null sets are empty on an atomic space, so "a.e."
/// statements become exact set statements.
class MeasurableSet {
 public:
  using Bits = boost::dynamic_bitset<std::uint64_t>;

  explicit MeasurableSet(MeasureSpace space);
  MeasurableSet(MeasureSpace space, Bits members);

  static MeasurableSet empty(const MeasureSpace& space);
  static MeasurableSet full(const MeasureSpace& space);
  static MeasurableSet from_indices(const MeasureSpace& space,
                                    std::span<const std::size_t> indices);
  template <class Pred>
  static MeasurableSet where(const MeasureSpace& space, Pred&& pred) {
    Bits bits(space.size());
    for (std::size_t i = 0; i < space.size(); ++i)
      if (pred(i)) bits.set(i);
    return MeasurableSet(space, std::move(bits));
  }

  const MeasureSpace& space() const noexcept { return space_; }
  const Bits& bits() const noexcept { return members_; }

  bool contains(std::size_t i) const { return members_.test(i); }
  std::size_t count() const noexcept { return members_.count(); }
  bool is_empty() const noexcept { return members_.none(); }
  double measure() const;
  std::vector<std::size_t> indices() const;

  bool is_subset_of(const MeasurableSet& other) const;
  bool intersects(const MeasurableSet& other) const;

  MeasurableSet complement() const;
  MeasurableSet operator|(const MeasurableSet& other) const;
  MeasurableSet operator&(const MeasurableSet& other) const;
  MeasurableSet operator-(const MeasurableSet& other) const;

  friend bool operator==(const MeasurableSet& a, const MeasurableSet& b) {
    return a.space_ == b.space_ && a.members_ == b.members_;
  }

 private:
  MeasureSpace space_;
  Bits members_;
};

inline MeasurableSet complement(const MeasurableSet& e) { return e.complement(); }
inline MeasurableSet set_union(const MeasurableSet& e, const MeasurableSet& f) { return e | f; }
inline MeasurableSet intersect(const MeasurableSet& e, const MeasurableSet& f) { return e & f; }
inline double measure(const MeasurableSet& e) { return e.measure(); }

}  // namespace flatlab
