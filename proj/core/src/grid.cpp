#include "dpgeo/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "dpgeo/error.hpp"

namespace dpgeo {

Grid::Grid(double half_length, std::size_t n_points)
    : half_length_(half_length), n_(n_points), h_(0.0) {
  if (!(half_length > 0.0) || !std::isfinite(half_length))
    throw Error(ErrorKind::invalid_grid, "grid half length must be positive and finite");
  if (n_points < 4 || n_points % 2 != 0)
    throw Error(ErrorKind::invalid_grid,
                "grid size must be an even integer >= 4, got " + std::to_string(n_points));
  h_ = 2.0 * half_length / static_cast<double>(n_points);
}

std::vector<double> Grid::nodes() const {
  std::vector<double> x(n_);
  for (std::size_t i = 0; i < n_; ++i) x[i] = node(i);
  return x;
}

double Grid::wavenumber(std::size_t j) const {
  return std::numbers::pi * static_cast<double>(j) / half_length_;
}

std::vector<double> Grid::wavenumbers() const {
  std::vector<double> k(n_);
  const long half = static_cast<long>(n_ / 2);
  for (std::size_t j = 0; j < n_; ++j) {
    long jj = static_cast<long>(j);
    if (jj >= half) jj -= static_cast<long>(n_);
    k[j] = std::numbers::pi * static_cast<double>(jj) / half_length_;
  }
  return k;
}

double Grid::reduce(double x) const {
  const double len = length();
  double y = std::fmod(x + half_length_, len);
  if (y < 0) y += len;
  if (y >= len) y -= len;
  return y - half_length_;
}

std::size_t Grid::floor_index(double x) const {
  double s = std::floor((x + half_length_) / h_);
  if (s < 0) s = 0;
  auto i = static_cast<std::size_t>(s);
  return std::min(i, n_ - 1);
}

Field::Field(const Grid& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw Error(ErrorKind::grid_mismatch, "field length " + std::to_string(values_.size()) +
                                              " does not match grid size " +
                                              std::to_string(grid_.size()));
}

Field Field::zeros(const Grid& grid) { return Field(grid, std::vector<double>(grid.size(), 0.0)); }

Field Field::constant(const Grid& grid, double c) {
  return Field(grid, std::vector<double>(grid.size(), c));
}

Field Field::sample(const Grid& grid, const std::function<double(double)>& fn) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid.node(i));
  return Field(grid, std::move(v));
}

Field Field::map(const std::function<double(double)>& fn) const {
  std::vector<double> v(values_.size());
  std::transform(values_.begin(), values_.end(), v.begin(), fn);
  return Field(grid_, std::move(v));
}

Field Field::shifted_cells(long cells) const {
  const long n = static_cast<long>(values_.size());
  std::vector<double> v(values_.size());
  for (long i = 0; i < n; ++i) {
    long src = ((i - cells) % n + n) % n;
    v[static_cast<std::size_t>(i)] = values_[static_cast<std::size_t>(src)];
  }
  return Field(grid_, std::move(v));
}

double Field::sup_norm() const {
  double s = 0.0;
  for (double v : values_) s = std::max(s, std::abs(v));
  return s;
}

double Field::max() const { return *std::max_element(values_.begin(), values_.end()); }
double Field::min() const { return *std::min_element(values_.begin(), values_.end()); }

void require_same_grid(const Field& a, const Field& b, const char* where) {
  if (a.grid() != b.grid())
    throw Error(ErrorKind::grid_mismatch, std::string(where) + ": fields live on different grids");
}

namespace {
template <class Op>
Field zip(const Field& a, const Field& b, Op op, const char* where) {
  require_same_grid(a, b, where);
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = op(a[i], b[i]);
  return Field(a.grid(), std::move(v));
}
}  // namespace

Field operator+(const Field& a, const Field& b) {
  return zip(a, b, [](double x, double y) { return x + y; }, "operator+");
}
Field operator-(const Field& a, const Field& b) {
  return zip(a, b, [](double x, double y) { return x - y; }, "operator-");
}
Field operator-(const Field& a) { return a.map([](double x) { return -x; }); }
Field operator*(double s, const Field& a) { return a.map([s](double x) { return s * x; }); }
Field operator*(const Field& a, double s) { return s * a; }
Field operator+(const Field& a, double c) { return a.map([c](double x) { return x + c; }); }
Field hadamard(const Field& a, const Field& b) {
  return zip(a, b, [](double x, double y) { return x * y; }, "hadamard");
}

}  // namespace dpgeo
