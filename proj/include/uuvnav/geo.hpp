#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace uuvnav::geo {

struct Point2D {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2D&, const Point2D&) = default;
};

inline Point2D operator+(Point2D a, Point2D b) { return {a.x + b.x, a.y + b.y}; }
inline Point2D operator-(Point2D a, Point2D b) { return {a.x - b.x, a.y - b.y}; }
inline Point2D operator*(double s, Point2D p) { return {s * p.x, s * p.y}; }

double distance(Point2D a, Point2D b);
double squared_distance(Point2D a, Point2D b);

/// Input error carrying the 1-based line of the offending text (0 when the
/// error is not tied to a line).
class GeoError : public std::runtime_error {
 public:
  GeoError(const std::string& message, int line = 0);
  int line() const { return line_; }

 private:
  int line_;
};

/// Water-depth raster in a projected planar frame. Row 0 is the northernmost
/// row; (origin_x, origin_y) is the lower-left corner of the lower-left cell.
/// Depths are positive downward; land and invalid cells hold nodata_value.
class BathymetryGrid {
 public:
  BathymetryGrid(double origin_x, double origin_y, double cell_size,
                 std::size_t n_rows, std::size_t n_cols,
                 std::vector<double> depth, double nodata_value);

  double origin_x() const { return origin_x_; }
  double origin_y() const { return origin_y_; }
  double cell_size() const { return cell_size_; }
  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return n_cols_; }
  std::size_t size() const { return depth_.size(); }
  double nodata_value() const { return nodata_; }
  const std::vector<double>& depths() const { return depth_; }

  std::size_t index(std::size_t row, std::size_t col) const {
    return row * n_cols_ + col;
  }
  double depth(std::size_t idx) const { return depth_[idx]; }
  bool is_water(std::size_t idx) const { return depth_[idx] != nodata_; }
  Point2D cell_center(std::size_t idx) const;
  double cell_area() const { return cell_size_ * cell_size_; }

  /// Translated copy; used for equivariance checks and reframing.
  BathymetryGrid translated(double dx, double dy) const;

  friend bool operator==(const BathymetryGrid&, const BathymetryGrid&) = default;

 private:
  double origin_x_;
  double origin_y_;
  double cell_size_;
  std::size_t n_rows_;
  std::size_t n_cols_;
  std::vector<double> depth_;
  double nodata_;
};

/// Simple closed polygon (the closing edge is implicit).
class MissionPolygon {
 public:
  explicit MissionPolygon(std::vector<Point2D> vertices);

  const std::vector<Point2D>& vertices() const { return vertices_; }
  MissionPolygon translated(double dx, double dy) const;

 private:
  std::vector<Point2D> vertices_;
};

BathymetryGrid load_ascii_grid(std::string_view text);
std::string write_ascii_grid(const BathymetryGrid& grid);

/// Accepts a GeoJSON Polygon geometry, a Feature holding one, or a
/// FeatureCollection whose first feature holds one. Only the exterior ring is
/// used; rings with holes are rejected.
MissionPolygon load_polygon_geojson(std::string_view text);

/// Even-odd test; points on the boundary are inside.
bool point_in_polygon(Point2D p, const MissionPolygon& poly);

/// Indices of water cells whose centers lie inside the polygon, ascending.
std::vector<std::size_t> water_cells_in(const BathymetryGrid& grid,
                                        const MissionPolygon& poly);

/// Sum of depth * cell area over water cells whose centers are in `poly`.
double volume_under_polygon(const BathymetryGrid& grid,
                            const MissionPolygon& poly);

}  // namespace uuvnav::geo
