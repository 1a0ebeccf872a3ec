#pragma once

#include <cstdint>
#include <vector>

#include "beamplan/geometry.hpp"

namespace beamplan {

/// User adjacency induced by the half-beamwidth predicate: two users are
/// adjacent when their angular separation seen from the satellite does not
/// exceed the half beamwidth. Diagonal is always true.
struct CoverageGraph {
    int n_users = 0;
    double half_beamwidth_deg = 0.0;
    std::vector<std::uint8_t> adjacency;  // row-major n x n, symmetric
    std::vector<double> angle_deg;        // cached pairwise view angles

    bool adjacent(int k, int l) const {
        return adjacency[static_cast<std::size_t>(k) * n_users + l] != 0;
    }
    double angle(int k, int l) const {
        return angle_deg[static_cast<std::size_t>(k) * n_users + l];
    }

    /// Build directly from a 0/1 matrix (no coordinates). Angle cache is
    /// filled with 0 for adjacent pairs and 2x the half beamwidth otherwise.
    static CoverageGraph from_adjacency(const std::vector<std::vector<int>>& matrix,
                                        double half_beamwidth_deg = 1.0);
};

CoverageGraph build_graph(const std::vector<GeoPoint>& users, const SatellitePose& sat,
                          double half_beamwidth_deg);

using Clique = std::vector<int>;                 // sorted ascending
using CandidatePartition = std::vector<Clique>;  // cliques sorted lexicographically

/// Every clique of the graph grouped by vertex count, each group in
/// lexicographic order. of_size(1) is always the full singleton list.
struct CliqueCatalog {
    std::vector<std::vector<Clique>> by_size;  // index = vertex count; [0] unused
    int max_size = 0;
    bool truncated = false;  // enumeration stopped early on the total budget

    const std::vector<Clique>& of_size(int size) const { return by_size.at(size); }
};

struct Stage1Options {
    int max_clique_size = 0;          // <= 0 selects min(n_users, 12)
    int candidate_cap = 64;           // retained candidates per expansion level
    long long clique_budget = 500000; // total cliques across all sizes
    int family_limit = 32;            // disjoint families explored per candidate/level
};

CliqueCatalog enumerate_cliques(const CoverageGraph& g, int max_clique_size,
                                long long clique_budget = 500000);

/// Greedy disjoint-clique packing: seeds one candidate per maximal family of
/// pairwise-disjoint largest cliques, then walks the catalog downward in
/// clique size, branching each unfinished candidate on every maximal family
/// of disjoint cliques of that size. Uncovered users are padded with
/// singletons at the end. Candidate count is capped deterministically,
/// preferring wider coverage and then lexicographically smaller candidates.
std::vector<CandidatePartition> expand_dictionary(const CliqueCatalog& catalog,
                                                  const Stage1Options& opt = {});

struct Beam {
    std::vector<int> users;  // sorted ascending
    GeoPoint center;
};

/// Partition of users into beams plus beam-center coordinates. Beams are kept
/// in lexicographic order of their user sets.
struct BeamPlan {
    std::vector<Beam> beams;
    int n_beams() const { return static_cast<int>(beams.size()); }
};

/// Minimum-cardinality candidate, ties broken by the summed squared
/// great-circle distance to centroid centers, then lexicographically.
/// Centers are ECEF centroids reprojected onto the sphere.
BeamPlan select_min_beams(const std::vector<CandidatePartition>& candidates,
                          const std::vector<GeoPoint>& users);

/// Connected-graph lower bound on the number of active beams; diagnostic only.
int theorem1_lower_bound(int n_users);

/// Full first stage: adjacency graph is assumed prebuilt over the same users.
BeamPlan stage1(const std::vector<GeoPoint>& users, const CoverageGraph& g,
                const Stage1Options& opt = {});

/// Throws std::invalid_argument unless beams are non-empty, pairwise
/// disjoint, and jointly cover exactly users 0..n_users-1.
void validate_partition(const BeamPlan& plan, int n_users);

/// All same-beam pairs that are not adjacent in the graph; empty means the
/// plan satisfies the pairwise angular constraint.
std::vector<std::pair<int, int>> infeasible_pairs(const BeamPlan& plan,
                                                  const CoverageGraph& g);

/// Partition plus pairwise-angle validation; throws on violation.
void validate_plan(const BeamPlan& plan, const CoverageGraph& g);

struct HpbwViolation {
    int beam = 0;
    int user = 0;
    double theta_deg = 0.0;
    double margin_deg = 0.0;  // theta - half-power angle
};

/// Post-centroid audit: users whose view angle to their beam center exceeds
/// the pattern's half-power angle. Reported, not enforced.
std::vector<HpbwViolation> audit_hpbw(const BeamPlan& plan,
                                      const std::vector<GeoPoint>& users,
                                      const SatellitePose& sat,
                                      double half_power_angle_deg);

}  // namespace beamplan
