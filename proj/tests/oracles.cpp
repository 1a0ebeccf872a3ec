#include "oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace beamplan::oracle {

double j1_series(double x) {
    if (x < 0.0 || x > 20.0)
        throw std::invalid_argument("j1_series: x outside [0, 20]");
    const long double half = static_cast<long double>(x) / 2.0L;
    const long double half_sq = half * half;
    long double term = half;  // m = 0: (x/2) / (0! * 1!)
    long double sum = term;
    for (int m = 1; m <= 120; ++m) {
        term *= -half_sq / (static_cast<long double>(m) * (m + 1));
        sum += term;
        if (m >= 30 && std::abs(term) < 1e-30L * std::abs(sum)) break;
    }
    return static_cast<double>(sum);
}

double j1_miller(double x) {
    if (x <= 0.0) return 0.0;
    if (x > 500.0) throw std::invalid_argument("j1_miller: x too large");
    int start = static_cast<int>(x + 20.0 + 2.0 * std::sqrt(x + 1.0));
    if (start % 2) ++start;

    long double above = 0.0L;   // J_{k+1}
    long double cur = 1e-300L;  // J_k, arbitrary small seed
    long double even_sum = 0.0L;
    long double j1_val = 0.0L;
    for (int k = start; k >= 1; --k) {
        const long double below = (2.0L * k / x) * cur - above;  // J_{k-1}
        above = cur;
        cur = below;
        const int order = k - 1;
        if (order == 1) j1_val = cur;
        if (order >= 2 && order % 2 == 0) even_sum += cur;
        if (std::abs(cur) > 1e250L) {
            cur *= 1e-250L;
            above *= 1e-250L;
            even_sum *= 1e-250L;
            j1_val *= 1e-250L;
        }
    }
    const long double norm = cur + 2.0L * even_sum;  // J0 + 2*sum of even orders
    return static_cast<double>(j1_val / norm);
}

double j1_reference(double x) { return (x <= 20.0) ? j1_series(x) : j1_miller(x); }

double normalized_gain_reference(double theta_deg, double aperture_radius_over_lambda) {
    if (theta_deg == 0.0) return 1.0;
    const double theta = theta_deg * std::numbers::pi / 180.0;
    const double u = 2.0 * std::numbers::pi * aperture_radius_over_lambda * std::sin(theta);
    if (u == 0.0) return 1.0;
    const double r = j1_reference(u) / u;
    return 4.0 * r * r;
}

int min_clique_cover_size(const CoverageGraph& g) {
    const int n = g.n_users;
    if (n > 20) throw std::invalid_argument("min_clique_cover_size: n too large");
    const unsigned full = (n == 20) ? 0xFFFFFu : ((1u << n) - 1u);

    std::vector<unsigned> nbr(n, 0);
    for (int v = 0; v < n; ++v)
        for (int u = 0; u < n; ++u)
            if (g.adjacent(v, u)) nbr[v] |= (1u << u);

    std::vector<char> is_clique(full + 1, 0);
    is_clique[0] = 1;
    for (unsigned m = 1; m <= full; ++m) {
        const int v = std::countr_zero(m);
        const unsigned rest = m & (m - 1);
        is_clique[m] = is_clique[rest] && ((rest & ~nbr[v]) == 0);
    }

    std::vector<int> dp(full + 1, std::numeric_limits<int>::max());
    dp[0] = 0;
    for (unsigned m = 1; m <= full; ++m) {
        const unsigned low = m & (~m + 1);
        // Enumerate submasks of m that contain the lowest vertex.
        for (unsigned s = m; s != 0; s = (s - 1) & m) {
            if (!(s & low) || !is_clique[s]) continue;
            if (dp[m ^ s] != std::numeric_limits<int>::max())
                dp[m] = std::min(dp[m], dp[m ^ s] + 1);
        }
    }
    return dp[full];
}

namespace {

void extend_clique(const CoverageGraph& g, Clique& current, int from, int max_size,
                   std::vector<std::vector<Clique>>& out) {
    if (static_cast<int>(current.size()) >= max_size) return;
    for (int v = from; v < g.n_users; ++v) {
        bool ok = true;
        for (int u : current)
            if (!g.adjacent(u, v)) {
                ok = false;
                break;
            }
        if (!ok) continue;
        current.push_back(v);
        out[current.size()].push_back(current);
        extend_clique(g, current, v + 1, max_size, out);
        current.pop_back();
    }
}

}  // namespace

std::vector<std::vector<Clique>> all_cliques_backtracking(const CoverageGraph& g,
                                                          int max_size) {
    std::vector<std::vector<Clique>> out(static_cast<std::size_t>(max_size) + 1);
    Clique current;
    extend_clique(g, current, 0, max_size, out);
    for (auto& level : out) std::sort(level.begin(), level.end());
    return out;
}

ExhaustiveClustering exhaustive_best_partition(const std::vector<EcefVector>& points,
                                               int n_clusters, const CoverageGraph& g) {
    const int n = static_cast<int>(points.size());
    if (n > 12) throw std::invalid_argument("exhaustive_best_partition: n too large");

    ExhaustiveClustering best;
    best.inertia_km2 = std::numeric_limits<double>::infinity();

    long long total = 1;
    for (int i = 0; i < n; ++i) total *= n_clusters;

    std::vector<int> assign(n, 0);
    for (long long code = 0; code < total; ++code) {
        long long c = code;
        for (int i = 0; i < n; ++i) {
            assign[i] = static_cast<int>(c % n_clusters);
            c /= n_clusters;
        }
        std::vector<int> counts(n_clusters, 0);
        for (int a : assign) counts[a] += 1;
        if (std::any_of(counts.begin(), counts.end(), [](int x) { return x == 0; })) continue;

        bool feasible = true;
        for (int i = 0; i < n && feasible; ++i)
            for (int j = i + 1; j < n; ++j)
                if (assign[i] == assign[j] && !g.adjacent(i, j)) {
                    feasible = false;
                    break;
                }
        if (!feasible) continue;

        std::vector<EcefVector> means(n_clusters);
        for (int i = 0; i < n; ++i) means[assign[i]] = means[assign[i]] + points[i];
        for (int b = 0; b < n_clusters; ++b) means[b] = means[b] * (1.0 / counts[b]);
        double inertia = 0.0;
        for (int i = 0; i < n; ++i) {
            const EcefVector d = points[i] - means[assign[i]];
            inertia += dot(d, d);
        }
        if (inertia < best.inertia_km2) {
            best.inertia_km2 = inertia;
            best.assignment = assign;
            best.found = true;
        }
    }
    return best;
}

double scg_db_linear_route(double theta_deg, double slant_range_km,
                           const LinkBudgetParams& p) {
    const long double lambda = static_cast<long double>(p.wavelength_m());
    const long double pi = std::numbers::pi_v<long double>;
    const long double grx = static_cast<long double>(p.antenna_efficiency) * pi * pi *
                            p.antenna_diameter_m * p.antenna_diameter_m / (lambda * lambda);
    const long double gmax = std::pow(10.0L, static_cast<long double>(p.max_beam_gain_db) / 10.0L);
    const long double pattern =
        static_cast<long double>(normalized_gain_reference(theta_deg,
                                                           p.aperture_radius_over_lambda));
    const long double s_m = static_cast<long double>(slant_range_km) * 1000.0L;
    const long double lfs = 16.0L * pi * pi * s_m * s_m / (lambda * lambda);
    const long double latm =
        std::pow(10.0L, static_cast<long double>(p.atmospheric_loss_db) / 10.0L);
    const long double scg = grx * gmax * pattern / (lfs * latm);
    return static_cast<double>(10.0L * std::log10(scg));
}

double haversine_km(const GeoPoint& a, const GeoPoint& b, double radius_km) {
    const double la = deg_to_rad(a.lat_deg());
    const double lb = deg_to_rad(b.lat_deg());
    const double dlat = lb - la;
    const double dlon = deg_to_rad(b.lon_deg() - a.lon_deg());
    const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                     std::cos(la) * std::cos(lb) * std::sin(dlon / 2) * std::sin(dlon / 2);
    return 2.0 * radius_km * std::asin(std::min(1.0, std::sqrt(h)));
}

}  // namespace beamplan::oracle
