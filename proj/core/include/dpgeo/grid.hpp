#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace dpgeo {

// Uniform periodic sampling of [-L, L). Node i sits at -L + i*h.
class Grid {
 public:
  Grid(double half_length, std::size_t n_points);

  double half_length() const { return half_length_; }
  std::size_t size() const { return n_; }
  double spacing() const { return h_; }
  double length() const { return 2.0 * half_length_; }

  double node(std::size_t i) const { return -half_length_ + static_cast<double>(i) * h_; }
  std::vector<double> nodes() const;

  // Half-spectrum wavenumber pi*j/L, j = 0..N/2 (the r2c layout used throughout).
  double wavenumber(std::size_t j) const;
  // Full FFT ordering: 0, 1, ..., N/2-1, -N/2, ..., -1 (times pi/L).
  std::vector<double> wavenumbers() const;
  std::size_t spectrum_size() const { return n_ / 2 + 1; }

  // Map x into [-L, L).
  double reduce(double x) const;
  // Nearest node index at or below x (x already inside the box).
  std::size_t floor_index(double x) const;

  bool operator==(const Grid& o) const { return half_length_ == o.half_length_ && n_ == o.n_; }
  bool operator!=(const Grid& o) const { return !(*this == o); }

 private:
  double half_length_;
  std::size_t n_;
  double h_;
};

// Immutable real samples on a grid.
class Field {
 public:
  Field(const Grid& grid, std::vector<double> values);

  static Field zeros(const Grid& grid);
  static Field constant(const Grid& grid, double c);
  static Field sample(const Grid& grid, const std::function<double(double)>& fn);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  const std::vector<double>& data() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  Field map(const std::function<double(double)>& fn) const;
  Field shifted_cells(long cells) const;  // value at node i comes from node i - cells

  double sup_norm() const;
  double max() const;
  double min() const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator-(const Field& a);
Field operator*(double s, const Field& a);
Field operator*(const Field& a, double s);
Field operator+(const Field& a, double c);
// Pointwise product without filtering.
Field hadamard(const Field& a, const Field& b);

void require_same_grid(const Field& a, const Field& b, const char* where);

}  // namespace dpgeo
