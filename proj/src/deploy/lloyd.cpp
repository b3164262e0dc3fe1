#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "uuvnav/deploy.hpp"

namespace uuvnav::deploy {

using geo::Point2D;

std::string to_string(BeaconDepth depth) {
  switch (depth) {
    case BeaconDepth::seafloor:
      return "seafloor";
    case BeaconDepth::midwater:
      return "midwater";
    case BeaconDepth::surface:
      return "surface";
  }
  return "seafloor";
}

BeaconDepth beacon_depth_from_string(const std::string& text) {
  if (text == "seafloor") return BeaconDepth::seafloor;
  if (text == "midwater") return BeaconDepth::midwater;
  if (text == "surface") return BeaconDepth::surface;
  throw DeployError("unknown beacon depth '" + text + "'");
}

WaterRegion WaterRegion::from(const geo::BathymetryGrid& grid,
                              const geo::MissionPolygon& poly) {
  WaterRegion region;
  region.cells = geo::water_cells_in(grid, poly);
  region.cell_size = grid.cell_size();
  region.centers.reserve(region.cells.size());
  region.volumes.reserve(region.cells.size());
  for (std::size_t idx : region.cells) {
    region.centers.push_back(grid.cell_center(idx));
    const double v = grid.depth(idx) * grid.cell_area();
    region.volumes.push_back(v);
    region.total_volume += v;
  }
  return region;
}

double objective(std::span<const double> volumes, double v_tot) {
  if (volumes.empty()) throw DeployError("objective needs at least one volume");
  const double n = static_cast<double>(volumes.size());
  const double target = v_tot / n;
  double sum = 0.0;
  for (double v : volumes) sum += std::abs(v - target);
  return sum / n;
}

CellAssignment assign_cells(std::span<const Point2D> sites, std::span<const double> weights,
                            const WaterRegion& region) {
  if (sites.empty()) throw DeployError("assign_cells needs at least one site");
  if (weights.size() != sites.size()) {
    throw DeployError("assign_cells: " + std::to_string(weights.size()) +
                      " weights for " + std::to_string(sites.size()) + " sites");
  }
  CellAssignment out;
  out.cells = region.cells;
  out.site_of.resize(region.size());
  for (std::size_t k = 0; k < region.size(); ++k) {
    const Point2D c = region.centers[k];
    std::size_t best = 0;
    double best_power = geo::squared_distance(c, sites[0]) - weights[0];
    for (std::size_t s = 1; s < sites.size(); ++s) {
      const double power = geo::squared_distance(c, sites[s]) - weights[s];
      if (power < best_power) {
        best_power = power;
        best = s;
      }
    }
    out.site_of[k] = best;
  }
  return out;
}

CellAssignment assign_cells(std::span<const Point2D> sites, std::span<const double> weights,
                            const geo::BathymetryGrid& grid,
                            const geo::MissionPolygon& poly) {
  return assign_cells(sites, weights, WaterRegion::from(grid, poly));
}

std::vector<double> region_volumes(const CellAssignment& assignment,
                                   const WaterRegion& region, std::size_t n_sites) {
  std::vector<double> volumes(n_sites, 0.0);
  for (std::size_t k = 0; k < assignment.site_of.size(); ++k) {
    volumes[assignment.site_of[k]] += region.volumes[k];
  }
  return volumes;
}

std::vector<Point2D> region_centroids(const CellAssignment& assignment,
                                      const WaterRegion& region,
                                      std::span<const Point2D> sites) {
  std::vector<double> mass(sites.size(), 0.0);
  std::vector<double> mx(sites.size(), 0.0);
  std::vector<double> my(sites.size(), 0.0);
  for (std::size_t k = 0; k < assignment.site_of.size(); ++k) {
    const std::size_t s = assignment.site_of[k];
    const double v = region.volumes[k];
    mass[s] += v;
    mx[s] += v * region.centers[k].x;
    my[s] += v * region.centers[k].y;
  }
  std::vector<Point2D> out(sites.begin(), sites.end());
  for (std::size_t s = 0; s < sites.size(); ++s) {
    if (mass[s] > 0.0) out[s] = {mx[s] / mass[s], my[s] / mass[s]};
  }
  return out;
}

double lloyd_energy(const CellAssignment& assignment, const WaterRegion& region,
                    std::span<const Point2D> sites) {
  double energy = 0.0;
  for (std::size_t k = 0; k < assignment.site_of.size(); ++k) {
    energy += region.volumes[k] *
              geo::squared_distance(region.centers[k], sites[assignment.site_of[k]]);
  }
  return energy;
}

Point2D snap_to_region(Point2D p, const WaterRegion& region) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < region.size(); ++k) {
    const double d = geo::squared_distance(p, region.centers[k]);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return region.centers[best];
}

namespace {

// Farthest-point seeding: a random first cell, then repeatedly the cell whose
// distance to the nearest chosen seed is largest (lowest index on ties).
std::vector<Point2D> farthest_point_seeds(const WaterRegion& region, std::size_t n,
                                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  // Modulo rather than a distribution object so the choice is the same on
  // every standard library.
  const std::size_t first = static_cast<std::size_t>(rng() % region.size());
  std::vector<Point2D> seeds{region.centers[first]};
  std::vector<double> nearest(region.size());
  for (std::size_t k = 0; k < region.size(); ++k) {
    nearest[k] = geo::squared_distance(region.centers[k], seeds[0]);
  }
  while (seeds.size() < n) {
    const auto it = std::max_element(nearest.begin(), nearest.end());
    const Point2D next = region.centers[static_cast<std::size_t>(it - nearest.begin())];
    seeds.push_back(next);
    for (std::size_t k = 0; k < region.size(); ++k) {
      nearest[k] = std::min(nearest[k], geo::squared_distance(region.centers[k], next));
    }
  }
  return seeds;
}

}  // namespace

DeploymentResult lloyd_deploy(const DeploymentProblem& problem) {
  const std::size_t n = problem.n_beacons;
  if (n < 1) throw DeployError("n_beacons must be at least 1");
  if (problem.max_iterations < 1) throw DeployError("max_iterations must be at least 1");
  if (!(problem.volume_tolerance > 0.0 && problem.volume_tolerance < 1.0)) {
    throw DeployError("volume_tolerance must lie in (0, 1)");
  }
  const WaterRegion region = WaterRegion::from(problem.grid, problem.poly);
  if (region.size() < n) {
    throw DeployError("only " + std::to_string(region.size()) +
                      " water cells lie inside the mission polygon, fewer than the " +
                      std::to_string(n) + " requested beacons");
  }

  const double target = region.total_volume / static_cast<double>(n);
  const double region_area =
      static_cast<double>(region.size()) * region.cell_size * region.cell_size;
  const double spacing_sq = region_area / static_cast<double>(n);
  const double tolerance = problem.volume_tolerance * target;

  std::vector<Point2D> sites = farthest_point_seeds(region, n, problem.rng_seed);
  std::vector<double> weights(n, 0.0);

  DeploymentResult result;
  result.total_volume = region.total_volume;
  for (std::size_t iter = 1;; ++iter) {
    CellAssignment assignment = assign_cells(sites, weights, region);
    std::vector<double> volumes = region_volumes(assignment, region, n);
    const double obj = objective(volumes, region.total_volume);

    std::vector<Point2D> centroids = region_centroids(assignment, region, sites);
    for (auto& c : centroids) c = snap_to_region(c, region);
    double movement = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      movement = std::max(movement, geo::distance(sites[s], centroids[s]));
    }

    const bool balanced = target > 0.0 ? obj <= tolerance : true;
    const bool settled = movement <= region.cell_size;
    if ((balanced && settled) || iter >= problem.max_iterations) {
      result.beacon_positions = std::move(centroids);
      result.cell_volumes = std::move(volumes);
      result.sites = sites;
      result.weights = weights;
      result.assignment = std::move(assignment);
      result.objective = obj;
      result.iterations_used = iter;
      result.converged = balanced && settled;
      break;
    }

    for (std::size_t s = 0; s < n; ++s) {
      if (target > 0.0) {
        weights[s] += kWeightGain * (target - volumes[s]) / target * spacing_sq;
      }
    }
    sites = std::move(centroids);
  }

  for (const Point2D& p : result.beacon_positions) {
    const Point2D snapped = snap_to_region(p, region);
    std::size_t k = 0;
    while (region.centers[k] != snapped) ++k;
    result.beacon_depths.push_back(problem.grid.depth(region.cells[k]));
    result.depth_kinds.push_back(BeaconDepth::seafloor);
  }
  return result;
}

}  // namespace uuvnav::deploy
