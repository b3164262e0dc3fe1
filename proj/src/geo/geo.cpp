#include "uuvnav/geo.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "numfmt.hpp"

namespace uuvnav::geo {

double distance(Point2D a, Point2D b) { return std::hypot(a.x - b.x, a.y - b.y); }

double squared_distance(Point2D a, Point2D b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

GeoError::GeoError(const std::string& message, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message
                                  : message),
      line_(line) {}

BathymetryGrid::BathymetryGrid(double origin_x, double origin_y, double cell_size,
                               std::size_t n_rows, std::size_t n_cols,
                               std::vector<double> depth, double nodata_value)
    : origin_x_(origin_x),
      origin_y_(origin_y),
      cell_size_(cell_size),
      n_rows_(n_rows),
      n_cols_(n_cols),
      depth_(std::move(depth)),
      nodata_(nodata_value) {
  if (!(cell_size_ > 0.0) || !std::isfinite(cell_size_)) {
    throw GeoError("cellsize must be positive");
  }
  if (!std::isfinite(origin_x_) || !std::isfinite(origin_y_)) {
    throw GeoError("grid origin must be finite");
  }
  if (depth_.size() != n_rows_ * n_cols_) {
    throw GeoError("expected " + std::to_string(n_rows_ * n_cols_) +
                   " depth values, got " + std::to_string(depth_.size()));
  }
  for (double d : depth_) {
    if (d == nodata_) continue;
    if (!std::isfinite(d) || d < 0.0) {
      throw GeoError("water depth must be finite and non-negative, got " +
                     format_number(d));
    }
  }
}

Point2D BathymetryGrid::cell_center(std::size_t idx) const {
  const std::size_t row = idx / n_cols_;
  const std::size_t col = idx % n_cols_;
  return {origin_x_ + (static_cast<double>(col) + 0.5) * cell_size_,
          origin_y_ + (static_cast<double>(n_rows_ - row) - 0.5) * cell_size_};
}

BathymetryGrid BathymetryGrid::translated(double dx, double dy) const {
  return BathymetryGrid(origin_x_ + dx, origin_y_ + dy, cell_size_, n_rows_, n_cols_,
                        depth_, nodata_);
}

namespace {

double cross(Point2D o, Point2D a, Point2D b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(Point2D p, Point2D a, Point2D b) {
  if (cross(a, b, p) != 0.0) return false;
  return p.x >= std::min(a.x, b.x) && p.x <= std::max(a.x, b.x) &&
         p.y >= std::min(a.y, b.y) && p.y <= std::max(a.y, b.y);
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

bool segments_intersect(Point2D p1, Point2D p2, Point2D q1, Point2D q2) {
  const int d1 = sign(cross(q1, q2, p1));
  const int d2 = sign(cross(q1, q2, p2));
  const int d3 = sign(cross(p1, p2, q1));
  const int d4 = sign(cross(p1, p2, q2));
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  return on_segment(p1, q1, q2) || on_segment(p2, q1, q2) ||
         on_segment(q1, p1, p2) || on_segment(q2, p1, p2);
}

}  // namespace

MissionPolygon::MissionPolygon(std::vector<Point2D> vertices)
    : vertices_(std::move(vertices)) {
  const std::size_t n = vertices_.size();
  if (n < 3) throw GeoError("mission polygon needs at least 3 vertices");
  for (const auto& v : vertices_) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) {
      throw GeoError("mission polygon has a non-finite vertex");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (vertices_[i] == vertices_[(i + 1) % n]) {
      throw GeoError("mission polygon has repeated consecutive vertex " +
                     std::to_string(i));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Point2D a1 = vertices_[i];
    const Point2D a2 = vertices_[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point2D b1 = vertices_[j];
      const Point2D b2 = vertices_[(j + 1) % n];
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) {
        // Shared vertex is fine; collinear backtracking is not.
        const Point2D shared = (j == i + 1) ? a2 : a1;
        const Point2D u = (j == i + 1) ? a1 : a2;
        const Point2D w = (j == i + 1) ? b2 : b1;
        if (cross(shared, u, w) == 0.0) {
          const double dot =
              (u.x - shared.x) * (w.x - shared.x) + (u.y - shared.y) * (w.y - shared.y);
          if (dot > 0.0) {
            throw GeoError("mission polygon edges " + std::to_string(i) + " and " +
                           std::to_string(j) + " overlap");
          }
        }
        continue;
      }
      if (segments_intersect(a1, a2, b1, b2)) {
        throw GeoError("mission polygon edges " + std::to_string(i) + " and " +
                       std::to_string(j) + " intersect");
      }
    }
  }
}

MissionPolygon MissionPolygon::translated(double dx, double dy) const {
  std::vector<Point2D> moved;
  moved.reserve(vertices_.size());
  for (const auto& v : vertices_) moved.push_back({v.x + dx, v.y + dy});
  return MissionPolygon(std::move(moved));
}

bool point_in_polygon(Point2D p, const MissionPolygon& poly) {
  const auto& v = poly.vertices();
  const std::size_t n = v.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if (on_segment(p, v[j], v[i])) return true;
    const bool crosses = (v[i].y > p.y) != (v[j].y > p.y);
    if (crosses) {
      const double x_at =
          v[j].x + (p.y - v[j].y) * (v[i].x - v[j].x) / (v[i].y - v[j].y);
      if (p.x < x_at) inside = !inside;
    }
  }
  return inside;
}

std::vector<std::size_t> water_cells_in(const BathymetryGrid& grid,
                                        const MissionPolygon& poly) {
  double min_x = poly.vertices().front().x, max_x = min_x;
  double min_y = poly.vertices().front().y, max_y = min_y;
  for (const auto& v : poly.vertices()) {
    min_x = std::min(min_x, v.x);
    max_x = std::max(max_x, v.x);
    min_y = std::min(min_y, v.y);
    max_y = std::max(max_y, v.y);
  }
  std::vector<std::size_t> cells;
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (!grid.is_water(idx)) continue;
    const Point2D c = grid.cell_center(idx);
    if (c.x < min_x || c.x > max_x || c.y < min_y || c.y > max_y) continue;
    if (point_in_polygon(c, poly)) cells.push_back(idx);
  }
  return cells;
}

double volume_under_polygon(const BathymetryGrid& grid, const MissionPolygon& poly) {
  double volume = 0.0;
  for (std::size_t idx : water_cells_in(grid, poly)) {
    volume += grid.depth(idx) * grid.cell_area();
  }
  return volume;
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool parse_double(std::string_view tok, double& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}

}  // namespace

BathymetryGrid load_ascii_grid(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;

  bool have_ncols = false, have_nrows = false, have_x = false, have_y = false,
       have_cell = false;
  bool x_center = false, y_center = false;
  double ncols = 0, nrows = 0, x = 0, y = 0, cell = 0, nodata = -9999.0;

  std::vector<double> values;
  bool in_body = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::string first;
    if (!(tokens >> first)) continue;
    const bool alpha = std::isalpha(static_cast<unsigned char>(first[0])) != 0;
    if (!in_body && alpha) {
      const std::string key = lower(first);
      std::string value_tok, extra;
      if (!(tokens >> value_tok) || (tokens >> extra)) {
        throw GeoError("header '" + first + "' needs exactly one value", line_no);
      }
      double value = 0.0;
      if (!parse_double(value_tok, value)) {
        throw GeoError("non-numeric header value '" + value_tok + "'", line_no);
      }
      if (key == "ncols") {
        ncols = value, have_ncols = true;
      } else if (key == "nrows") {
        nrows = value, have_nrows = true;
      } else if (key == "xllcorner" || key == "xllcenter") {
        x = value, have_x = true, x_center = key == "xllcenter";
      } else if (key == "yllcorner" || key == "yllcenter") {
        y = value, have_y = true, y_center = key == "yllcenter";
      } else if (key == "cellsize") {
        cell = value, have_cell = true;
      } else if (key == "nodata_value") {
        nodata = value;
      } else {
        throw GeoError("unknown header key '" + first + "'", line_no);
      }
      continue;
    }
    if (!in_body) {
      if (!(have_ncols && have_nrows && have_x && have_y && have_cell)) {
        throw GeoError(
            "incomplete header (need ncols, nrows, xllcorner, yllcorner, cellsize)",
            line_no);
      }
      if (ncols < 1 || nrows < 1 || ncols != std::floor(ncols) ||
          nrows != std::floor(nrows)) {
        throw GeoError("ncols and nrows must be positive integers", line_no);
      }
      in_body = true;
    }
    std::istringstream body(line);
    std::string tok;
    while (body >> tok) {
      double v = 0.0;
      if (!parse_double(tok, v)) {
        throw GeoError("non-numeric value '" + tok + "'", line_no);
      }
      values.push_back(v);
    }
  }
  if (!in_body) throw GeoError("grid has no data values", line_no);

  const auto rows = static_cast<std::size_t>(nrows);
  const auto cols = static_cast<std::size_t>(ncols);
  if (values.size() != rows * cols) {
    throw GeoError("value count mismatch: expected " + std::to_string(rows * cols) +
                       " values, got " + std::to_string(values.size()),
                   line_no);
  }
  if (x_center) x -= cell / 2.0;
  if (y_center) y -= cell / 2.0;
  try {
    return BathymetryGrid(x, y, cell, rows, cols, std::move(values), nodata);
  } catch (const GeoError& e) {
    throw GeoError(e.what(), line_no);
  }
}

std::string write_ascii_grid(const BathymetryGrid& grid) {
  std::string out;
  out += "ncols " + std::to_string(grid.n_cols()) + "\n";
  out += "nrows " + std::to_string(grid.n_rows()) + "\n";
  out += "xllcorner " + format_number(grid.origin_x()) + "\n";
  out += "yllcorner " + format_number(grid.origin_y()) + "\n";
  out += "cellsize " + format_number(grid.cell_size()) + "\n";
  out += "NODATA_value " + format_number(grid.nodata_value()) + "\n";
  for (std::size_t r = 0; r < grid.n_rows(); ++r) {
    for (std::size_t c = 0; c < grid.n_cols(); ++c) {
      if (c > 0) out += ' ';
      out += format_number(grid.depth(grid.index(r, c)));
    }
    out += '\n';
  }
  return out;
}

}  // namespace uuvnav::geo
