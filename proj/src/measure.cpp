#include "flatlab/measure.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>

#include "flatlab/errors.hpp"

namespace flatlab {

void CompensatedSum::add(double v) noexcept {
  const double t = sum_ + v;
  if (std::abs(sum_) >= std::abs(v))
    carry_ += (sum_ - t) + v;
  else
    carry_ += (v - t) + sum_;
  sum_ = t;
}

namespace {

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) {
    h ^= (v >> (8 * b)) & 0xffu;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

MeasureSpace MeasureSpace::finish(Data d) {
  if (d.weights.empty())
    throw InvalidDiscretization("measure space needs at least one atom");
  CompensatedSum total;
  d.min_weight = d.weights.front();
  for (double w : d.weights) {
    if (!(w > 0.0) || !std::isfinite(w))
      throw InvalidDiscretization("atom weights must be finite and positive");
    total.add(w);
    d.min_weight = std::min(d.min_weight, w);
  }
  d.total = total.value();
  if (d.geometry == Geometry::Grid && d.nx * d.ny != d.weights.size())
    throw InvalidDiscretization("grid dimensions inconsistent with atom count");

  std::uint64_t h = 0xcbf29ce484222325ull;
  h = fnv1a(h, static_cast<std::uint64_t>(d.geometry));
  h = fnv1a(h, d.nx);
  h = fnv1a(h, d.ny);
  h = fnv1a(h, d.weights.size());
  for (double w : d.weights) h = fnv1a(h, std::bit_cast<std::uint64_t>(w));
  d.fingerprint = h;
  return MeasureSpace(std::make_shared<const Data>(std::move(d)));
}

MeasureSpace MeasureSpace::uniform_interval(std::size_t n) {
  if (n < 2) throw InvalidDiscretization("interval needs n >= 2 atoms");
  Data d;
  d.geometry = Geometry::Interval;
  d.weights.assign(n, 1.0 / static_cast<double>(n));
  d.centers.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    d.centers[i] = {(static_cast<double>(i) + 0.5) / static_cast<double>(n), 0.0};
  return finish(std::move(d));
}

MeasureSpace MeasureSpace::product_grid(std::size_t nx, std::size_t ny) {
  if (nx < 2 || ny < 2) throw InvalidDiscretization("grid needs nx, ny >= 2");
  Data d;
  d.geometry = Geometry::Grid;
  d.nx = nx;
  d.ny = ny;
  const std::size_t n = nx * ny;
  d.weights.assign(n, 1.0 / static_cast<double>(n));
  d.centers.resize(n);
  for (std::size_t iy = 0; iy < ny; ++iy)
    for (std::size_t ix = 0; ix < nx; ++ix)
      d.centers[iy * nx + ix] = {(static_cast<double>(ix) + 0.5) / static_cast<double>(nx),
                                 (static_cast<double>(iy) + 0.5) / static_cast<double>(ny)};
  return finish(std::move(d));
}

MeasureSpace MeasureSpace::from_weights(std::vector<double> weights) {
  Data d;
  d.geometry = Geometry::Custom;
  d.centers.resize(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i)
    d.centers[i] = {static_cast<double>(i), 0.0};
  d.weights = std::move(weights);
  return finish(std::move(d));
}

std::size_t MeasureSpace::column_of(std::size_t i) const {
  if (geometry() != Geometry::Grid) throw GeometryMismatch("space is not a product grid");
  return i % data_->nx;
}

std::size_t MeasureSpace::row_of(std::size_t i) const {
  if (geometry() != Geometry::Grid) throw GeometryMismatch("space is not a product grid");
  return i / data_->nx;
}

std::size_t MeasureSpace::atom_at(std::size_t ix, std::size_t iy) const {
  if (geometry() != Geometry::Grid) throw GeometryMismatch("space is not a product grid");
  return iy * data_->nx + ix;
}

std::string MeasureSpace::fingerprint_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fingerprint()));
  return buf;
}

std::string MeasureSpace::describe() const {
  switch (geometry()) {
    case Geometry::Interval:
      return "interval:" + std::to_string(size());
    case Geometry::Grid:
      return "grid:" + std::to_string(nx()) + "x" + std::to_string(ny());
    case Geometry::Custom:
      break;
  }
  return "custom:" + std::to_string(size());
}

void require_same_space(const MeasureSpace& a, const MeasureSpace& b,
                        const char* what) {
  if (!(a == b))
    throw SpaceMismatch(std::string(what) + ": operands live on different spaces (" +
                        a.describe() + " vs " + b.describe() + ")");
}

MeasurableSet::MeasurableSet(MeasureSpace space)
    : space_(std::move(space)), members_(space_.size()) {}

MeasurableSet::MeasurableSet(MeasureSpace space, Bits members)
    : space_(std::move(space)), members_(std::move(members)) {
  if (members_.size() != space_.size())
    throw SpaceMismatch("member bitset size differs from atom count");
}

MeasurableSet MeasurableSet::empty(const MeasureSpace& space) {
  return MeasurableSet(space);
}

MeasurableSet MeasurableSet::full(const MeasureSpace& space) {
  Bits b(space.size());
  b.set();
  return MeasurableSet(space, std::move(b));
}

MeasurableSet MeasurableSet::from_indices(const MeasureSpace& space,
                                          std::span<const std::size_t> indices) {
  Bits b(space.size());
  for (std::size_t i : indices) {
    if (i >= space.size()) throw SpaceMismatch("atom index out of range");
    b.set(i);
  }
  return MeasurableSet(space, std::move(b));
}

double MeasurableSet::measure() const {
  CompensatedSum s;
  for (auto i = members_.find_first(); i != Bits::npos; i = members_.find_next(i))
    s.add(space_.weight(i));
  return s.value();
}

std::vector<std::size_t> MeasurableSet::indices() const {
  std::vector<std::size_t> out;
  out.reserve(members_.count());
  for (auto i = members_.find_first(); i != Bits::npos; i = members_.find_next(i))
    out.push_back(i);
  return out;
}

bool MeasurableSet::is_subset_of(const MeasurableSet& other) const {
  require_same_space(space_, other.space_, "is_subset_of");
  return members_.is_subset_of(other.members_);
}

bool MeasurableSet::intersects(const MeasurableSet& other) const {
  require_same_space(space_, other.space_, "intersects");
  return members_.intersects(other.members_);
}

MeasurableSet MeasurableSet::complement() const {
  return MeasurableSet(space_, ~members_);
}

MeasurableSet MeasurableSet::operator|(const MeasurableSet& other) const {
  require_same_space(space_, other.space_, "union");
  return MeasurableSet(space_, members_ | other.members_);
}

MeasurableSet MeasurableSet::operator&(const MeasurableSet& other) const {
  require_same_space(space_, other.space_, "intersect");
  return MeasurableSet(space_, members_ & other.members_);
}

MeasurableSet MeasurableSet::operator-(const MeasurableSet& other) const {
  require_same_space(space_, other.space_, "difference");
  return MeasurableSet(space_, members_ - other.members_);
}

}  // namespace flatlab
