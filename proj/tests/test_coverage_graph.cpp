#include <doctest.h>

#include <algorithm>
#include <set>
#include <stdexcept>

#include "beamplan/coverage_graph.hpp"
#include "beamplan/prng.hpp"
#include "beamplan/scenario.hpp"
#include "oracles.hpp"

using namespace beamplan;

namespace {

const SatellitePose kRefSat{GeoPoint(0.0, -88.7), 8063.0};

// Adjacency structure of the pinned 10-user demo layout (0-based).
const std::vector<std::vector<int>> kDemoMatrix = {
    {1, 0, 1, 1, 1, 0, 1, 0, 0, 0},
    {0, 1, 1, 0, 0, 0, 0, 1, 0, 1},
    {1, 1, 1, 1, 0, 1, 0, 0, 0, 0},
    {1, 0, 1, 1, 1, 0, 0, 0, 1, 0},
    {1, 0, 0, 1, 1, 0, 1, 0, 0, 0},
    {0, 0, 1, 0, 0, 1, 0, 1, 0, 0},
    {1, 0, 0, 0, 1, 0, 1, 0, 0, 0},
    {0, 1, 0, 0, 0, 1, 0, 1, 0, 1},
    {0, 0, 0, 1, 0, 0, 0, 0, 1, 0},
    {0, 1, 0, 0, 0, 0, 0, 1, 0, 1},
};

const std::vector<Clique> kDemoPairs = {
    {0, 2}, {0, 3}, {0, 4}, {0, 6}, {1, 2}, {1, 7}, {1, 9},
    {2, 3}, {2, 5}, {3, 4}, {3, 8}, {4, 6}, {5, 7}, {7, 9}};

const std::vector<Clique> kDemoTriples = {{0, 2, 3}, {0, 3, 4}, {0, 4, 6}, {1, 7, 9}};

const CandidatePartition kDemoBestPartition = {{0, 4, 6}, {1, 7, 9}, {2, 5}, {3, 8}};

std::vector<GeoPoint> random_users(Prng& rng, int n, double scale = 1.0) {
    std::vector<GeoPoint> users;
    users.reserve(n);
    const double lat0 = 35.0 - 5.0 * scale, lat1 = 35.0 + 5.0 * scale;
    const double lon0 = -115.0 - 5.0 * scale, lon1 = -115.0 + 5.0 * scale;
    for (int i = 0; i < n; ++i)
        users.emplace_back(rng.uniform(lat0, lat1), rng.uniform(lon0, lon1));
    return users;
}

}  // namespace

TEST_CASE("build_graph trivial cases") {
    const std::vector<GeoPoint> one{GeoPoint(35, -115)};
    const CoverageGraph g1 = build_graph(one, kRefSat, 1.6);
    CHECK(g1.n_users == 1);
    CHECK(g1.adjacent(0, 0));

    const std::vector<GeoPoint> twins{GeoPoint(35, -115), GeoPoint(35, -115)};
    const CoverageGraph g2 = build_graph(twins, kRefSat, 1.6);
    CHECK(g2.adjacent(0, 1));
    CHECK(g2.angle(0, 1) == 0.0);

    CHECK_THROWS_AS(build_graph({}, kRefSat, 1.6), std::invalid_argument);
}

TEST_CASE("demo layout realizes the expected adjacency matrix") {
    const CoverageGraph g = build_graph(example1_users(), kRefSat, 1.6);
    REQUIRE(g.n_users == 10);
    for (int k = 0; k < 10; ++k)
        for (int l = 0; l < 10; ++l) {
            INFO("pair (", k, ",", l, ") angle ", g.angle(k, l));
            CHECK(static_cast<int>(g.adjacent(k, l)) == kDemoMatrix[k][l]);
        }
}

TEST_CASE("clique catalog on the demo layout matches the known structure") {
    const CoverageGraph g = build_graph(example1_users(), kRefSat, 1.6);
    const CliqueCatalog cat = enumerate_cliques(g, 10);

    REQUIRE(cat.max_size == 3);  // no 4-vertex clique exists
    CHECK(cat.of_size(1).size() == 10);
    for (int v = 0; v < 10; ++v) CHECK(cat.of_size(1)[v] == Clique{v});
    CHECK(cat.of_size(2) == kDemoPairs);
    CHECK(cat.of_size(3) == kDemoTriples);
}

TEST_CASE("the same catalog falls out of the matrix-only entry point") {
    const CoverageGraph g = CoverageGraph::from_adjacency(kDemoMatrix, 1.6);
    const CliqueCatalog cat = enumerate_cliques(g, 10);
    REQUIRE(cat.max_size == 3);
    CHECK(cat.of_size(2) == kDemoPairs);
    CHECK(cat.of_size(3) == kDemoTriples);
}

TEST_CASE("dictionary expansion reproduces the worked packing") {
    const CoverageGraph g = CoverageGraph::from_adjacency(kDemoMatrix, 1.6);
    const auto candidates = expand_dictionary(enumerate_cliques(g, 10));

    auto contains = [&](const CandidatePartition& want) {
        return std::find(candidates.begin(), candidates.end(), want) != candidates.end();
    };
    // the three seed pairings of disjoint largest cliques, padded to cover
    CHECK(contains({{0, 2, 3}, {1, 7, 9}, {4, 6}, {5}, {8}}));
    CHECK(contains({{0, 3, 4}, {1, 7, 9}, {2, 5}, {6}, {8}}));
    CHECK(contains(kDemoBestPartition));
    // every candidate covers all users exactly once
    for (const auto& cand : candidates) {
        std::set<int> seen;
        std::size_t total = 0;
        for (const auto& c : cand) {
            seen.insert(c.begin(), c.end());
            total += c.size();
        }
        CHECK(seen.size() == 10);
        CHECK(total == 10);
    }
}

TEST_CASE("selection returns the 4-beam partition") {
    const auto& users = example1_users();
    const CoverageGraph g = build_graph(users, kRefSat, 1.6);
    const BeamPlan plan = stage1(users, g);

    REQUIRE(plan.n_beams() == 4);
    CandidatePartition got;
    for (const Beam& b : plan.beams) got.push_back(b.users);
    CHECK(got == kDemoBestPartition);
    CHECK_NOTHROW(validate_plan(plan, g));
}

TEST_CASE("single-user and coincident-user instances collapse to one beam") {
    const std::vector<GeoPoint> one{GeoPoint(35, -115)};
    const CoverageGraph g1 = build_graph(one, kRefSat, 1.6);
    const BeamPlan p1 = stage1(one, g1);
    CHECK(p1.n_beams() == 1);
    CHECK(p1.beams[0].center.lat_deg() == doctest::Approx(35.0).epsilon(1e-9));

    const std::vector<GeoPoint> same(5, GeoPoint(33, -112));
    const CoverageGraph g2 = build_graph(same, kRefSat, 1.6);
    const BeamPlan p2 = stage1(same, g2);
    CHECK(p2.n_beams() == 1);
    CHECK(p2.beams[0].users.size() == 5);
    CHECK(p2.beams[0].center.lon_deg() == doctest::Approx(-112.0).epsilon(1e-9));
}

TEST_CASE("an edgeless graph yields all singletons") {
    std::vector<std::vector<int>> far(6, std::vector<int>(6, 0));
    for (int i = 0; i < 6; ++i) far[i][i] = 1;
    const CoverageGraph g = CoverageGraph::from_adjacency(far);
    const auto candidates = expand_dictionary(enumerate_cliques(g, 6));
    REQUIRE(candidates.size() == 1);
    CHECK(candidates[0].size() == 6);
    for (int v = 0; v < 6; ++v) CHECK(candidates[0][v] == Clique{v});
}

TEST_CASE("beam-count lower bound") {
    CHECK(theorem1_lower_bound(10) == 2);
    CHECK(theorem1_lower_bound(2) == 2);
    CHECK(theorem1_lower_bound(3) == 3);
    CHECK(theorem1_lower_bound(1) == 1);
    CHECK(theorem1_lower_bound(0) == 1);
}

TEST_CASE("clique enumeration agrees with a backtracking enumerator on random graphs") {
    Prng rng(4242, 0);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 5 + rng.next_below(11);  // up to 15 vertices
        const double p = rng.uniform(0.2, 0.8);
        std::vector<std::vector<int>> m(n, std::vector<int>(n, 0));
        for (int i = 0; i < n; ++i) {
            m[i][i] = 1;
            for (int j = i + 1; j < n; ++j) m[i][j] = m[j][i] = (rng.next_unit() < p) ? 1 : 0;
        }
        const CoverageGraph g = CoverageGraph::from_adjacency(m);
        const CliqueCatalog cat = enumerate_cliques(g, n);
        const auto expected = oracle::all_cliques_backtracking(g, n);
        for (int s = 1; s <= cat.max_size; ++s) CHECK(cat.of_size(s) == expected[s]);
        if (cat.max_size + 1 < static_cast<int>(expected.size()))
            CHECK(expected[cat.max_size + 1].empty());
    }
}

TEST_CASE("every subset of a catalog clique one size down is also cataloged") {
    Prng rng(7, 0);
    const auto users = random_users(rng, 12);
    const CoverageGraph g = build_graph(users, kRefSat, 1.6);
    const CliqueCatalog cat = enumerate_cliques(g, 12);
    for (int s = 2; s <= cat.max_size; ++s) {
        for (const Clique& c : cat.of_size(s)) {
            for (std::size_t drop = 0; drop < c.size(); ++drop) {
                Clique sub;
                for (std::size_t i = 0; i < c.size(); ++i)
                    if (i != drop) sub.push_back(c[i]);
                const auto& level = cat.of_size(s - 1);
                CHECK(std::binary_search(level.begin(), level.end(), sub));
            }
        }
    }
}

TEST_CASE("first-stage beam count is optimal or near-optimal on small instances") {
    Prng rng(99, 1);
    int excess_cases = 0;
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 5 + rng.next_below(8);  // 5..12 users
        const auto users = random_users(rng, n, rng.uniform(0.15, 1.0));
        const CoverageGraph g = build_graph(users, kRefSat, 1.6);
        const BeamPlan plan = stage1(users, g);
        const int optimum = oracle::min_clique_cover_size(g);
        CHECK(plan.n_beams() >= optimum);
        CHECK(plan.n_beams() <= optimum + 1);
        if (plan.n_beams() != optimum) ++excess_cases;
    }
    CHECK(excess_cases <= 3);
}

TEST_CASE("adding an edge never increases the optimal beam count") {
    Prng rng(123, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 6 + rng.next_below(5);
        std::vector<std::vector<int>> m(n, std::vector<int>(n, 0));
        for (int i = 0; i < n; ++i) {
            m[i][i] = 1;
            for (int j = i + 1; j < n; ++j) m[i][j] = m[j][i] = (rng.next_unit() < 0.4) ? 1 : 0;
        }
        const int before = oracle::min_clique_cover_size(CoverageGraph::from_adjacency(m));
        std::vector<std::pair<int, int>> missing;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (!m[i][j]) missing.emplace_back(i, j);
        if (missing.empty()) continue;
        const auto [a, b] = missing[rng.next_below(static_cast<int>(missing.size()))];
        m[a][b] = m[b][a] = 1;
        const int after = oracle::min_clique_cover_size(CoverageGraph::from_adjacency(m));
        CHECK(after <= before);
    }
}

TEST_CASE("identical inputs produce identical plans") {
    Prng rng(2718, 0);
    const auto users = random_users(rng, 15);
    const CoverageGraph g = build_graph(users, kRefSat, 1.6);
    const BeamPlan a = stage1(users, g);
    const BeamPlan b = stage1(users, g);
    REQUIRE(a.n_beams() == b.n_beams());
    for (int i = 0; i < a.n_beams(); ++i) {
        CHECK(a.beams[i].users == b.beams[i].users);
        CHECK(a.beams[i].center.lat_deg() == b.beams[i].center.lat_deg());
        CHECK(a.beams[i].center.lon_deg() == b.beams[i].center.lon_deg());
    }
}

TEST_CASE("plan validation catches broken partitions") {
    const CoverageGraph g = CoverageGraph::from_adjacency(kDemoMatrix, 1.6);
    BeamPlan missing;
    missing.beams.push_back({{0, 2, 3}, GeoPoint(0, 0)});
    CHECK_THROWS_AS(validate_partition(missing, 10), std::invalid_argument);

    BeamPlan doubled;
    doubled.beams.push_back({{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, GeoPoint(0, 0)});
    doubled.beams.push_back({{0}, GeoPoint(0, 0)});
    CHECK_THROWS_AS(validate_partition(doubled, 10), std::invalid_argument);

    BeamPlan infeasible;
    infeasible.beams.push_back({{0, 1}, GeoPoint(0, 0)});  // 0 and 1 are not adjacent
    for (int v = 2; v < 10; ++v) infeasible.beams.push_back({{v}, GeoPoint(0, 0)});
    CHECK(infeasible_pairs(infeasible, g) == std::vector<std::pair<int, int>>{{0, 1}});
    CHECK_THROWS_AS(validate_plan(infeasible, g), std::invalid_argument);
}

TEST_CASE("hpbw audit reports members outside the half-power cone") {
    const auto& users = example1_users();
    const CoverageGraph g = build_graph(users, kRefSat, 1.6);
    const BeamPlan plan = stage1(users, g);
    // audit against an artificially tight cone: every multi-user member violates
    const auto tight = audit_hpbw(plan, users, kRefSat, 1e-6);
    std::size_t multi_members = 0;
    for (const Beam& b : plan.beams)
        if (b.users.size() > 1) multi_members += b.users.size();
    CHECK(tight.size() == multi_members);
    for (const auto& v : tight) CHECK(v.margin_deg > 0.0);
    // and against a huge cone: nothing does
    CHECK(audit_hpbw(plan, users, kRefSat, 60.0).empty());
}
