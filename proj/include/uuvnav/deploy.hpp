#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "uuvnav/geo.hpp"

namespace uuvnav::deploy {

class DeployError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Twice the 2000 m beacon acoustic range: a vehicle on a leg no longer than
/// this is always within range of one of its endpoints.
inline constexpr double kDefaultLinkDistance = 4000.0;

/// Gain of the volume-balancing weight update.
inline constexpr double kWeightGain = 0.5;

struct DeploymentProblem {
  geo::BathymetryGrid grid;
  geo::MissionPolygon poly;
  std::size_t n_beacons = 1;
  std::size_t max_iterations = 100;
  double volume_tolerance = 0.05;
  std::uint64_t rng_seed = 0;
};

/// Water cells under the mission polygon with their centers and volumes, in
/// ascending grid index order.
struct WaterRegion {
  std::vector<std::size_t> cells;
  std::vector<geo::Point2D> centers;
  std::vector<double> volumes;
  double cell_size = 0.0;
  double total_volume = 0.0;

  static WaterRegion from(const geo::BathymetryGrid& grid, const geo::MissionPolygon& poly);
  std::size_t size() const { return cells.size(); }
};

/// site_of[k] is the site owning region cell k (grid index cells[k]).
struct CellAssignment {
  std::vector<std::size_t> cells;
  std::vector<std::size_t> site_of;
};

enum class BeaconDepth { seafloor, midwater, surface };
std::string to_string(BeaconDepth depth);
BeaconDepth beacon_depth_from_string(const std::string& text);

struct DeploymentResult {
  std::vector<geo::Point2D> beacon_positions;
  std::vector<double> cell_volumes;
  /// Power weights that, with the generating sites, produced `assignment`.
  std::vector<geo::Point2D> sites;
  std::vector<double> weights;
  CellAssignment assignment;
  /// Water depth under each beacon; beacons default to sitting on the seafloor.
  std::vector<double> beacon_depths;
  std::vector<BeaconDepth> depth_kinds;
  double total_volume = 0.0;
  double objective = 0.0;
  std::size_t iterations_used = 0;
  bool converged = false;
};

/// Mean absolute deviation of the per-beacon volumes from v_tot / N.
double objective(std::span<const double> volumes, double v_tot);

/// Power-diagram assignment: each cell goes to the site minimising
/// |center - site|^2 - weight, lowest site index on ties.
CellAssignment assign_cells(std::span<const geo::Point2D> sites,
                            std::span<const double> weights, const WaterRegion& region);
CellAssignment assign_cells(std::span<const geo::Point2D> sites,
                            std::span<const double> weights,
                            const geo::BathymetryGrid& grid, const geo::MissionPolygon& poly);

std::vector<double> region_volumes(const CellAssignment& assignment,
                                   const WaterRegion& region, std::size_t n_sites);

/// Volume-weighted centroid of every site's cells. Sites that own no cell
/// keep their current position.
std::vector<geo::Point2D> region_centroids(const CellAssignment& assignment,
                                           const WaterRegion& region,
                                           std::span<const geo::Point2D> sites);

/// Sum over cells of volume * |center - owning site|^2.
double lloyd_energy(const CellAssignment& assignment, const WaterRegion& region,
                    std::span<const geo::Point2D> sites);

/// Center of the region cell nearest to p (lowest index on ties).
geo::Point2D snap_to_region(geo::Point2D p, const WaterRegion& region);

DeploymentResult lloyd_deploy(const DeploymentProblem& problem);

struct GraphEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  double length = 0.0;
};

struct BeaconGraph {
  std::vector<geo::Point2D> nodes;
  std::vector<GraphEdge> edges;
  /// adjacency[i] lists indices into `edges`.
  std::vector<std::vector<std::size_t>> adjacency;
  double coverage_link_distance = kDefaultLinkDistance;

  std::size_t neighbor(std::size_t edge, std::size_t from) const {
    return edges[edge].a == from ? edges[edge].b : edges[edge].a;
  }
};

BeaconGraph build_beacon_graph(std::span<const geo::Point2D> positions,
                               double coverage_link_distance = kDefaultLinkDistance);
BeaconGraph build_beacon_graph(const DeploymentResult& result,
                               double coverage_link_distance = kDefaultLinkDistance);

struct Route {
  std::vector<std::size_t> nodes;  // empty when the goal is unreachable
  double length = 0.0;
  std::size_t expanded = 0;

  bool reachable() const { return !nodes.empty(); }
};

/// A* over the beacon graph with straight-line distance to the goal as the
/// heuristic. Throws DeployError for an index outside the graph.
Route astar_route(const BeaconGraph& graph, std::size_t start, std::size_t goal);

}  // namespace uuvnav::deploy
