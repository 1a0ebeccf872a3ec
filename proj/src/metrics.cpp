#include "beamplan/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace beamplan {

void validate(const Weights& w) {
    if (!(w.distance >= 0.0) || !(w.beam_count >= 0.0))
        throw std::invalid_argument("Weights: components must be non-negative");
    if (std::abs(w.distance + w.beam_count - 1.0) > 1e-9)
        throw std::invalid_argument("Weights: components must sum to 1");
}

EvaluationReport evaluate(const BeamPlan& plan, const std::vector<GeoPoint>& users,
                          const SatellitePose& sat, const LinkBudgetParams& params,
                          const Weights& weights) {
    validate(params);
    validate(weights);
    validate_partition(plan, static_cast<int>(users.size()));

    EvaluationReport report;
    report.n_beams = plan.n_beams();
    const double beam_power_dbw =
        params.total_power_dbw - 10.0 * std::log10(static_cast<double>(report.n_beams));

    double distance_term = 0.0;
    double cnr_sum = 0.0;
    report.min_cnr_db = std::numeric_limits<double>::infinity();

    for (int b = 0; b < plan.n_beams(); ++b) {
        const Beam& beam = plan.beams[b];
        const double user_power_dbw =
            beam_power_dbw - 10.0 * std::log10(static_cast<double>(beam.users.size()));
        for (int u : beam.users) {
            const double theta = view_angle_deg(sat, beam.center, users[u]);
            const double slant = slant_range_km(sat, users[u]);
            const LinkMetrics lm = link_metrics(theta, slant, user_power_dbw, params);
            report.per_user.push_back({u, b, theta, lm.scgnr_db, lm.cnr_db});
            report.min_cnr_db = std::min(report.min_cnr_db, lm.cnr_db);
            cnr_sum += lm.cnr_db;
            const double d = great_circle_distance_km(users[u], beam.center);
            distance_term += d * d;
        }
    }

    std::sort(report.per_user.begin(), report.per_user.end(),
              [](const PerUserMetrics& a, const PerUserMetrics& b) { return a.user < b.user; });
    report.avg_cnr_db = cnr_sum / static_cast<double>(users.size());
    report.load_gap = load_gap(plan);
    report.load_variance = load_variance(plan);
    report.weighted_objective =
        weights.distance * distance_term + weights.beam_count * report.n_beams;

    report.cdf_points.reserve(report.per_user.size());
    for (const auto& pu : report.per_user) report.cdf_points.push_back(pu.scgnr_db);
    std::sort(report.cdf_points.begin(), report.cdf_points.end());
    return report;
}

BeamPlan beam_aperture_baseline(const std::vector<GeoPoint>& users,
                                const SatellitePose& sat, double half_beamwidth_deg) {
    const int n = static_cast<int>(users.size());
    if (n == 0) throw std::invalid_argument("beam_aperture_baseline: empty user list");

    std::vector<bool> served(n, false);
    BeamPlan plan;
    for (int seed = 0; seed < n; ++seed) {
        if (served[seed]) continue;
        Beam beam;
        beam.users.push_back(seed);
        served[seed] = true;
        for (int u = seed + 1; u < n; ++u) {
            if (served[u]) continue;
            if (view_angle_deg(sat, users[seed], users[u]) <= half_beamwidth_deg) {
                beam.users.push_back(u);
                served[u] = true;
            }
        }
        beam.center = centroid_on_sphere(users, beam.users);
        plan.beams.push_back(std::move(beam));
    }
    return plan;
}

BeamPlan homogeneous_balance_baseline(const std::vector<GeoPoint>& users, int n_beams) {
    const int n = static_cast<int>(users.size());
    if (n == 0) throw std::invalid_argument("homogeneous_balance_baseline: empty user list");
    if (n_beams < 1 || n_beams > n)
        throw std::invalid_argument("homogeneous_balance_baseline: n_beams outside [1, K]");

    struct Cluster {
        std::vector<int> members;
        EcefVector centroid;
    };
    std::vector<Cluster> clusters(n);
    for (int i = 0; i < n; ++i)
        clusters[i] = {{i}, geo_to_ecef(users[i], kEarthRadiusKm)};

    while (static_cast<int>(clusters.size()) > n_beams) {
        std::size_t best_i = 0, best_j = 1;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < clusters.size(); ++i) {
            for (std::size_t j = i + 1; j < clusters.size(); ++j) {
                const EcefVector d = clusters[i].centroid - clusters[j].centroid;
                const double dist = dot(d, d);
                if (dist < best_d - 1e-15) {
                    best_d = dist;
                    best_i = i;
                    best_j = j;
                }
            }
        }
        Cluster& a = clusters[best_i];
        Cluster& b = clusters[best_j];
        a.members.insert(a.members.end(), b.members.begin(), b.members.end());
        std::sort(a.members.begin(), a.members.end());
        EcefVector sum{};
        for (int m : a.members) sum = sum + geo_to_ecef(users[m], kEarthRadiusKm);
        a.centroid = sum * (1.0 / static_cast<double>(a.members.size()));
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(best_j));
    }

    std::sort(clusters.begin(), clusters.end(),
              [](const Cluster& a, const Cluster& b) { return a.members < b.members; });
    BeamPlan plan;
    for (const Cluster& c : clusters)
        plan.beams.push_back({c.members, centroid_on_sphere(users, c.members)});
    return plan;
}

int load_gap(const BeamPlan& plan) {
    if (plan.beams.empty()) return 0;
    std::size_t lo = plan.beams[0].users.size();
    std::size_t hi = lo;
    for (const Beam& b : plan.beams) {
        lo = std::min(lo, b.users.size());
        hi = std::max(hi, b.users.size());
    }
    return static_cast<int>(hi - lo);
}

double load_variance(const BeamPlan& plan) {
    if (plan.beams.empty()) return 0.0;
    const double n = static_cast<double>(plan.beams.size());
    double mean = 0.0;
    for (const Beam& b : plan.beams) mean += static_cast<double>(b.users.size());
    mean /= n;
    double var = 0.0;
    for (const Beam& b : plan.beams) {
        const double d = static_cast<double>(b.users.size()) - mean;
        var += d * d;
    }
    return var / n;
}

}  // namespace beamplan
