#pragma once

#include <cstdint>
#include <vector>

#include "beamplan/coverage_graph.hpp"
#include "beamplan/geometry.hpp"

namespace beamplan {

struct BalancerConfig {
    int restart_budget = 20;   // restart 0 is warm-started from the input plan
    int max_iterations = 300;  // Lloyd iterations per restart
    std::uint64_t seed = 1;    // drives the k-means++ seeding of restarts 1..N-1
};

struct KMeansState {
    std::vector<EcefVector> centroids;
    std::vector<int> assignment;  // point -> cluster
    int iteration = 0;
    double inertia_km2 = 0.0;     // sum of squared distances to assigned centroids
};

/// One Lloyd iteration: nearest-centroid assignment (squared Euclidean, ties
/// to the lowest cluster index), empty-cluster repair, then centroid update.
/// Inertia never increases from one step to the next.
KMeansState lloyd_step(const KMeansState& state, const std::vector<EcefVector>& points);

/// All same-beam pairs whose users are not adjacent in the coverage graph.
/// Empty result means the assignment is feasible.
std::vector<std::pair<int, int>> feasibility_check(const std::vector<int>& assignment,
                                                   const CoverageGraph& g);

struct RefineResult {
    BeamPlan plan;
    bool fell_back = false;   // no acceptable refinement; plan is the input plan
    int restart_index = -1;   // accepted restart, -1 on fallback
    double inertia_km2 = 0.0;
    double input_inertia_km2 = 0.0;
    std::vector<std::vector<double>> inertia_traces;  // per restart, per iteration
    std::vector<int> feasible_restarts;
};

/// K-means refinement with the cluster count fixed to the input beam count.
/// Restart 0 warm-starts from the input centroids; the remaining restarts use
/// seeded k-means++ initialization. A restart is accepted only if every
/// intra-beam pair is adjacent in the graph and its inertia does not exceed
/// the input plan's. The accepted restart with minimum inertia wins, ties to
/// the lowest restart index; with no acceptable restart the input plan is
/// returned and flagged.
RefineResult refine(const BeamPlan& plan, const std::vector<GeoPoint>& users,
                    const CoverageGraph& g, const BalancerConfig& cfg = {});

}  // namespace beamplan
