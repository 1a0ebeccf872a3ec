#pragma once

#include <vector>

#include "beamplan/coverage_graph.hpp"
#include "beamplan/geometry.hpp"
#include "beamplan/link_budget.hpp"

namespace beamplan {

/// Objective weights: distance term vs beam-count term. Must be non-negative
/// and sum to 1.
struct Weights {
    double distance = 0.5;
    double beam_count = 0.5;
};

void validate(const Weights& w);

struct PerUserMetrics {
    int user = 0;
    int beam = 0;
    double theta_deg = 0.0;
    double scgnr_db = 0.0;
    double cnr_db = 0.0;
};

struct EvaluationReport {
    std::vector<PerUserMetrics> per_user;
    double min_cnr_db = 0.0;
    double avg_cnr_db = 0.0;
    int load_gap = 0;           // max - min beam occupancy
    double load_variance = 0.0; // population variance of beam occupancy
    int n_beams = 0;
    double weighted_objective = 0.0;  // w_d * sum of squared great-circle
                                      // distances (km^2) + w_b * |beams|
    std::vector<double> cdf_points;   // per-user SCGNR, sorted ascending
};

/// Evaluate a plan under the equal-split power policy: the total budget is
/// divided equally across active beams, then equally across the users of
/// each beam.
EvaluationReport evaluate(const BeamPlan& plan, const std::vector<GeoPoint>& users,
                          const SatellitePose& sat, const LinkBudgetParams& params,
                          const Weights& weights);

/// Greedy aperture cover: repeatedly seed a beam at the lowest-index unserved
/// user, sweep in every unserved user within the half beamwidth of the seed,
/// and center the beam at the members' spherical centroid. Members may sit up
/// to twice the half beamwidth from each other.
BeamPlan beam_aperture_baseline(const std::vector<GeoPoint>& users,
                                const SatellitePose& sat, double half_beamwidth_deg);

/// Agglomerative grouping of nearest clusters (ECEF centroid distance) until
/// n_beams groups remain. Pure load-balance baseline: no beamwidth guarantee.
BeamPlan homogeneous_balance_baseline(const std::vector<GeoPoint>& users, int n_beams);

int load_gap(const BeamPlan& plan);
double load_variance(const BeamPlan& plan);

}  // namespace beamplan
