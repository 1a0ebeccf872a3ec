#include "beamplan/balancer.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "beamplan/prng.hpp"

namespace beamplan {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix_finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double sq_dist(const EcefVector& a, const EcefVector& b) {
    const EcefVector d = a - b;
    return dot(d, d);
}

int nearest_centroid(const EcefVector& p, const std::vector<EcefVector>& centroids) {
    int best = 0;
    double best_d = sq_dist(p, centroids[0]);
    for (int b = 1; b < static_cast<int>(centroids.size()); ++b) {
        const double d = sq_dist(p, centroids[b]);
        if (d < best_d) {
            best_d = d;
            best = b;
        }
    }
    return best;
}

double inertia_of(const std::vector<int>& assignment, const std::vector<EcefVector>& points,
                  const std::vector<EcefVector>& centroids) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
        total += sq_dist(points[i], centroids[assignment[i]]);
    return total;
}

std::vector<EcefVector> member_means(const std::vector<int>& assignment,
                                     const std::vector<EcefVector>& points, int n_clusters) {
    std::vector<EcefVector> means(n_clusters);
    std::vector<int> counts(n_clusters, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        means[assignment[i]] = means[assignment[i]] + points[i];
        counts[assignment[i]] += 1;
    }
    for (int b = 0; b < n_clusters; ++b)
        if (counts[b] > 0) means[b] = means[b] * (1.0 / counts[b]);
    return means;
}

std::vector<EcefVector> kmeanspp_seeds(const std::vector<EcefVector>& points, int n_clusters,
                                       Prng& rng) {
    const int n = static_cast<int>(points.size());
    std::vector<EcefVector> seeds;
    seeds.reserve(n_clusters);
    seeds.push_back(points[rng.next_below(n)]);
    std::vector<double> d2(n);
    while (static_cast<int>(seeds.size()) < n_clusters) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            double best = sq_dist(points[i], seeds[0]);
            for (std::size_t s = 1; s < seeds.size(); ++s)
                best = std::min(best, sq_dist(points[i], seeds[s]));
            d2[i] = best;
            total += best;
        }
        if (total <= 0.0) {
            seeds.push_back(points[rng.next_below(n)]);
            continue;
        }
        double r = rng.next_unit() * total;
        int pick = n - 1;
        for (int i = 0; i < n; ++i) {
            r -= d2[i];
            if (r <= 0.0) {
                pick = i;
                break;
            }
        }
        seeds.push_back(points[pick]);
    }
    return seeds;
}

BeamPlan plan_from_assignment(const std::vector<int>& assignment,
                              const std::vector<GeoPoint>& users, int n_clusters) {
    std::vector<std::vector<int>> groups(n_clusters);
    for (int i = 0; i < static_cast<int>(assignment.size()); ++i)
        groups[assignment[i]].push_back(i);
    std::sort(groups.begin(), groups.end());
    BeamPlan plan;
    for (auto& g : groups) {
        if (g.empty()) continue;
        Beam beam;
        beam.users = std::move(g);
        beam.center = centroid_on_sphere(users, beam.users);
        plan.beams.push_back(std::move(beam));
    }
    return plan;
}

}  // namespace

Prng::Prng(std::uint64_t seed, std::uint64_t stream)
    : counter_(splitmix_finalize(splitmix_finalize(seed) ^ (kGamma * (stream + 1)))) {}

std::uint64_t Prng::next_u64() {
    counter_ += kGamma;
    return splitmix_finalize(counter_);
}

double Prng::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Prng::uniform(double lo, double hi) { return lo + next_unit() * (hi - lo); }

int Prng::next_below(int n) {
    return static_cast<int>((static_cast<unsigned __int128>(next_u64()) *
                             static_cast<unsigned __int128>(n)) >> 64);
}

KMeansState lloyd_step(const KMeansState& state, const std::vector<EcefVector>& points) {
    const int n_clusters = static_cast<int>(state.centroids.size());
    const int n = static_cast<int>(points.size());
    if (n_clusters < 1) throw std::invalid_argument("lloyd_step: no centroids");
    if (n < n_clusters)
        throw std::invalid_argument("lloyd_step: fewer points than clusters");

    KMeansState next;
    next.iteration = state.iteration + 1;
    next.assignment.resize(n);
    for (int i = 0; i < n; ++i) next.assignment[i] = nearest_centroid(points[i], state.centroids);

    // Empty-cluster repair: donate the point farthest from its centroid,
    // taken from clusters that can spare one.
    std::vector<int> counts(n_clusters, 0);
    for (int a : next.assignment) counts[a] += 1;
    for (int b = 0; b < n_clusters; ++b) {
        while (counts[b] == 0) {
            int donor = -1;
            double worst = -1.0;
            for (int i = 0; i < n; ++i) {
                if (counts[next.assignment[i]] < 2) continue;
                const double d = sq_dist(points[i], state.centroids[next.assignment[i]]);
                if (d > worst) {
                    worst = d;
                    donor = i;
                }
            }
            if (donor < 0) break;  // cannot happen while n >= n_clusters
            counts[next.assignment[donor]] -= 1;
            next.assignment[donor] = b;
            counts[b] += 1;
        }
    }

    next.centroids = member_means(next.assignment, points, n_clusters);
    next.inertia_km2 = inertia_of(next.assignment, points, next.centroids);
    return next;
}

std::vector<std::pair<int, int>> feasibility_check(const std::vector<int>& assignment,
                                                   const CoverageGraph& g) {
    std::vector<std::pair<int, int>> bad;
    const int n = static_cast<int>(assignment.size());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (assignment[i] == assignment[j] && !g.adjacent(i, j))
                bad.emplace_back(i, j);
    return bad;
}

RefineResult refine(const BeamPlan& plan, const std::vector<GeoPoint>& users,
                    const CoverageGraph& g, const BalancerConfig& cfg) {
    const int n = static_cast<int>(users.size());
    if (n != g.n_users)
        throw std::invalid_argument("refine: user list does not match graph");
    validate_partition(plan, n);

    std::vector<EcefVector> points(n);
    for (int i = 0; i < n; ++i) points[i] = geo_to_ecef(users[i], kEarthRadiusKm);

    const int n_clusters = plan.n_beams();
    std::vector<int> input_assignment(n, -1);
    for (int b = 0; b < n_clusters; ++b)
        for (int u : plan.beams[b].users) input_assignment[u] = b;
    const std::vector<EcefVector> input_means =
        member_means(input_assignment, points, n_clusters);

    RefineResult result;
    result.plan = plan;
    result.input_inertia_km2 = inertia_of(input_assignment, points, input_means);
    result.inertia_km2 = result.input_inertia_km2;
    result.fell_back = true;

    const int restarts = std::max(1, cfg.restart_budget);
    double best_inertia = std::numeric_limits<double>::infinity();
    std::vector<int> best_assignment;

    for (int r = 0; r < restarts; ++r) {
        KMeansState state;
        state.centroids = (r == 0) ? input_means
                                   : [&] {
                                         Prng rng(cfg.seed, static_cast<std::uint64_t>(r));
                                         return kmeanspp_seeds(points, n_clusters, rng);
                                     }();
        std::vector<double> trace;
        std::vector<int> prev_assignment;
        for (int it = 0; it < cfg.max_iterations; ++it) {
            KMeansState next = lloyd_step(state, points);
            if (!trace.empty() && next.inertia_km2 > trace.back() + 1e-6)
                throw std::logic_error("refine: inertia increased within a restart");
            trace.push_back(next.inertia_km2);
            const bool settled = (next.assignment == prev_assignment);
            prev_assignment = next.assignment;
            state = std::move(next);
            if (settled) break;
        }
        result.inertia_traces.push_back(std::move(trace));

        const bool feasible = feasibility_check(state.assignment, g).empty();
        if (!feasible) continue;
        result.feasible_restarts.push_back(r);
        if (state.inertia_km2 > result.input_inertia_km2 + 1e-9) continue;
        if (state.inertia_km2 < best_inertia - 1e-12) {
            best_inertia = state.inertia_km2;
            best_assignment = state.assignment;
            result.restart_index = r;
        }
    }

    if (!best_assignment.empty()) {
        result.plan = plan_from_assignment(best_assignment, users, n_clusters);
        result.inertia_km2 = best_inertia;
        result.fell_back = false;
        if (result.plan.n_beams() != n_clusters)
            throw std::logic_error("refine: beam count changed");
    }
    return result;
}

}  // namespace beamplan
