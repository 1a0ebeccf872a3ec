#include "beamplan/coverage_graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace beamplan {

namespace {

// Word-packed vertex set; all masks in one expansion share the same width.
struct Mask {
    std::vector<std::uint64_t> w;

    explicit Mask(int n_users = 0) : w((n_users + 63) / 64, 0) {}

    void set(int v) { w[v >> 6] |= (std::uint64_t{1} << (v & 63)); }
    bool intersects(const Mask& o) const {
        for (std::size_t i = 0; i < w.size(); ++i)
            if (w[i] & o.w[i]) return true;
        return false;
    }
    void merge(const Mask& o) {
        for (std::size_t i = 0; i < w.size(); ++i) w[i] |= o.w[i];
    }
};

Mask clique_mask(const Clique& c, int n_users) {
    Mask m(n_users);
    for (int v : c) m.set(v);
    return m;
}

struct Candidate {
    CandidatePartition cliques;  // kept lexicographically sorted
    Mask covered;
    int covered_count = 0;
    bool complete = false;

    void add(const Clique& c, const Mask& m) {
        cliques.insert(std::upper_bound(cliques.begin(), cliques.end(), c), c);
        covered.merge(m);
        covered_count += static_cast<int>(c.size());
    }
};

bool candidate_before(const Candidate& a, const Candidate& b) {
    if (a.covered_count != b.covered_count) return a.covered_count > b.covered_count;
    return a.cliques < b.cliques;
}

// Enumerates maximal families of pairwise-disjoint cliques drawn from one
// catalog level, skipping cliques that touch `excluded`. Families are built
// in index-increasing order, so each family appears exactly once and output
// order is deterministic. A family is emitted only when no compatible clique
// of the level (at any index) can still be added. Exploration stops after
// `family_limit` families or `node_budget` search nodes.
class FamilyEnumerator {
public:
    FamilyEnumerator(int n_users, const std::vector<Mask>& masks, const Mask& excluded,
                     int family_limit, long long node_budget)
        : n_users_(n_users), masks_(masks), family_limit_(family_limit),
          node_budget_(node_budget) {
        for (std::size_t i = 0; i < masks_.size(); ++i)
            if (!masks_[i].intersects(excluded)) compat_.push_back(static_cast<int>(i));
    }

    std::vector<std::vector<int>> run() {
        if (!compat_.empty()) dfs(compat_, {}, Mask(n_users_));
        return families_;
    }

private:
    // Invariant: every index in `avail` is disjoint from `used`.
    void dfs(const std::vector<int>& avail, const std::vector<int>& chosen, const Mask& used) {
        if (static_cast<int>(families_.size()) >= family_limit_ || --node_budget_ < 0)
            return;
        for (std::size_t i = 0; i < avail.size(); ++i) {
            const int idx = avail[i];
            std::vector<int> next_avail;
            next_avail.reserve(avail.size() - i);
            for (std::size_t j = i + 1; j < avail.size(); ++j)
                if (!masks_[avail[j]].intersects(masks_[idx])) next_avail.push_back(avail[j]);
            Mask next_used = used;
            next_used.merge(masks_[idx]);
            std::vector<int> next_chosen = chosen;
            next_chosen.push_back(idx);
            if (next_avail.empty()) {
                if (is_maximal(next_used)) families_.push_back(std::move(next_chosen));
                if (static_cast<int>(families_.size()) >= family_limit_) return;
            } else {
                dfs(next_avail, next_chosen, next_used);
            }
        }
    }

    bool is_maximal(const Mask& used) const {
        for (int idx : compat_)
            if (!masks_[idx].intersects(used)) return false;
        return true;
    }

    int n_users_;
    const std::vector<Mask>& masks_;
    std::vector<int> compat_;
    int family_limit_;
    long long node_budget_;
    std::vector<std::vector<int>> families_;
};

void dedupe_and_prune(std::vector<Candidate>& cands, int cap) {
    std::sort(cands.begin(), cands.end(), candidate_before);
    cands.erase(std::unique(cands.begin(), cands.end(),
                            [](const Candidate& a, const Candidate& b) {
                                return a.cliques == b.cliques;
                            }),
                cands.end());
    if (static_cast<int>(cands.size()) > cap) cands.resize(cap);
}

}  // namespace

CoverageGraph CoverageGraph::from_adjacency(const std::vector<std::vector<int>>& matrix,
                                            double half_beamwidth_deg) {
    const int n = static_cast<int>(matrix.size());
    if (n == 0) throw std::invalid_argument("from_adjacency: empty matrix");
    CoverageGraph g;
    g.n_users = n;
    g.half_beamwidth_deg = half_beamwidth_deg;
    g.adjacency.assign(static_cast<std::size_t>(n) * n, 0);
    g.angle_deg.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int k = 0; k < n; ++k) {
        if (static_cast<int>(matrix[k].size()) != n)
            throw std::invalid_argument("from_adjacency: matrix is not square");
        for (int l = 0; l < n; ++l) {
            if (matrix[k][l] != matrix[l][k])
                throw std::invalid_argument("from_adjacency: matrix is not symmetric at (" +
                                            std::to_string(k) + "," + std::to_string(l) + ")");
            const bool adj = (k == l) || matrix[k][l] != 0;
            g.adjacency[static_cast<std::size_t>(k) * n + l] = adj ? 1 : 0;
            g.angle_deg[static_cast<std::size_t>(k) * n + l] =
                adj ? 0.0 : 2.0 * half_beamwidth_deg;
        }
    }
    return g;
}

CoverageGraph build_graph(const std::vector<GeoPoint>& users, const SatellitePose& sat,
                          double half_beamwidth_deg) {
    const int n = static_cast<int>(users.size());
    if (n == 0) throw std::invalid_argument("build_graph: empty user list");
    if (!(half_beamwidth_deg > 0.0))
        throw std::invalid_argument("build_graph: half beamwidth must be > 0");

    CoverageGraph g;
    g.n_users = n;
    g.half_beamwidth_deg = half_beamwidth_deg;
    g.adjacency.assign(static_cast<std::size_t>(n) * n, 0);
    g.angle_deg.assign(static_cast<std::size_t>(n) * n, 0.0);

    const EcefVector s = satellite_ecef(sat);
    std::vector<EcefVector> rays(n);
    for (int k = 0; k < n; ++k) rays[k] = geo_to_ecef(users[k], kEarthRadiusKm) - s;

    for (int k = 0; k < n; ++k) {
        g.adjacency[static_cast<std::size_t>(k) * n + k] = 1;
        for (int l = k + 1; l < n; ++l) {
            const double c = dot(rays[k], rays[l]) / (rays[k].norm() * rays[l].norm());
            const double psi = rad_to_deg(std::acos(std::clamp(c, -1.0, 1.0)));
            const std::uint8_t adj = (psi <= half_beamwidth_deg) ? 1 : 0;
            g.angle_deg[static_cast<std::size_t>(k) * n + l] = psi;
            g.angle_deg[static_cast<std::size_t>(l) * n + k] = psi;
            g.adjacency[static_cast<std::size_t>(k) * n + l] = adj;
            g.adjacency[static_cast<std::size_t>(l) * n + k] = adj;
        }
    }
    return g;
}

CliqueCatalog enumerate_cliques(const CoverageGraph& g, int max_clique_size,
                                long long clique_budget) {
    if (max_clique_size < 1)
        throw std::invalid_argument("enumerate_cliques: max clique size must be >= 1");
    const int n = g.n_users;

    CliqueCatalog cat;
    cat.by_size.resize(2);
    cat.by_size[1].reserve(n);
    for (int v = 0; v < n; ++v) cat.by_size[1].push_back({v});
    cat.max_size = 1;

    long long total = n;
    // Grow level by level: children extend a clique past its last vertex with
    // a vertex adjacent to every member, which visits each clique once and
    // keeps every level lexicographically sorted.
    while (cat.max_size < max_clique_size) {
        const auto& prev = cat.by_size[cat.max_size];
        std::vector<Clique> next;
        for (const Clique& c : prev) {
            for (int v = c.back() + 1; v < n; ++v) {
                bool ok = true;
                for (int u : c) {
                    if (!g.adjacent(u, v)) {
                        ok = false;
                        break;
                    }
                }
                if (ok) {
                    Clique child = c;
                    child.push_back(v);
                    next.push_back(std::move(child));
                }
            }
        }
        if (next.empty()) break;
        total += static_cast<long long>(next.size());
        if (total > clique_budget) {
            cat.truncated = true;
            break;
        }
        cat.by_size.push_back(std::move(next));
        cat.max_size += 1;
    }
    return cat;
}

std::vector<CandidatePartition> expand_dictionary(const CliqueCatalog& catalog,
                                                  const Stage1Options& opt) {
    if (catalog.max_size < 1 || catalog.of_size(1).empty())
        throw std::invalid_argument("expand_dictionary: empty catalog");
    const int n = static_cast<int>(catalog.of_size(1).size());
    const int cap = std::max(1, opt.candidate_cap);
    const long long node_budget = 20000;

    // Precompute masks per level.
    std::vector<std::vector<Mask>> masks(catalog.max_size + 1);
    for (int s = 1; s <= catalog.max_size; ++s) {
        masks[s].reserve(catalog.of_size(s).size());
        for (const Clique& c : catalog.of_size(s)) masks[s].push_back(clique_mask(c, n));
    }

    std::vector<Candidate> cands;

    // Seed from the largest cliques, then sweep the smaller sizes.
    for (int s = catalog.max_size; s >= 1; --s) {
        const auto& level = catalog.of_size(s);
        if (level.empty()) continue;

        if (cands.empty()) {
            FamilyEnumerator fe(n, masks[s], Mask(n), opt.family_limit, node_budget);
            for (const auto& fam : fe.run()) {
                Candidate c;
                c.covered = Mask(n);
                for (int idx : fam) c.add(level[idx], masks[s][idx]);
                c.complete = (c.covered_count == n);
                cands.push_back(std::move(c));
            }
            if (s == 1) break;  // the only family of singletons covers everyone
            dedupe_and_prune(cands, cap);
            continue;
        }
        if (s == 1) break;  // singleton padding below replaces the final level

        std::vector<Candidate> next;
        next.reserve(cands.size());
        for (const Candidate& cand : cands) {
            if (cand.complete) {
                next.push_back(cand);
                continue;
            }
            FamilyEnumerator fe(n, masks[s], cand.covered, opt.family_limit, node_budget);
            const auto families = fe.run();
            if (families.empty()) {
                next.push_back(cand);
                continue;
            }
            for (const auto& fam : families) {
                Candidate branched = cand;
                for (int idx : fam) branched.add(level[idx], masks[s][idx]);
                branched.complete = (branched.covered_count == n);
                next.push_back(std::move(branched));
            }
        }
        cands = std::move(next);
        dedupe_and_prune(cands, cap);
    }

    if (cands.empty()) {
        Candidate c;
        c.covered = Mask(n);
        cands.push_back(std::move(c));
    }

    // Pad uncovered users with singletons.
    for (Candidate& cand : cands) {
        if (cand.complete) continue;
        for (int v = 0; v < n; ++v) {
            if (!(cand.covered.w[v >> 6] & (std::uint64_t{1} << (v & 63)))) {
                Mask m(n);
                m.set(v);
                cand.add({v}, m);
            }
        }
        cand.complete = true;
    }
    dedupe_and_prune(cands, cap);

    std::vector<CandidatePartition> out;
    out.reserve(cands.size());
    for (Candidate& cand : cands) out.push_back(std::move(cand.cliques));
    return out;
}

BeamPlan select_min_beams(const std::vector<CandidatePartition>& candidates,
                          const std::vector<GeoPoint>& users) {
    if (candidates.empty())
        throw std::logic_error("select_min_beams: no candidates");

    std::size_t best_size = candidates[0].size();
    for (const auto& c : candidates) best_size = std::min(best_size, c.size());

    std::vector<const CandidatePartition*> ties;
    for (const auto& c : candidates)
        if (c.size() == best_size) ties.push_back(&c);

    const CandidatePartition* chosen = ties.front();
    if (ties.size() > 1) {
        // Minimize the squared great-circle spread around centroid centers;
        // residual ties go to the lexicographically smaller candidate.
        auto spread = [&users](const CandidatePartition& cand) {
            double score = 0.0;
            for (const Clique& beam : cand) {
                const GeoPoint center = centroid_on_sphere(users, beam);
                for (int k : beam) {
                    const double d = great_circle_distance_km(users[k], center);
                    score += d * d;
                }
            }
            return score;
        };
        double best_score = spread(*chosen);
        for (std::size_t i = 1; i < ties.size(); ++i) {
            const double score = spread(*ties[i]);
            if (score < best_score - 1e-9 ||
                (score < best_score + 1e-9 && *ties[i] < *chosen)) {
                best_score = std::min(score, best_score);
                chosen = ties[i];
            }
        }
    }

    BeamPlan plan;
    plan.beams.reserve(chosen->size());
    for (const Clique& beam : *chosen)
        plan.beams.push_back({beam, centroid_on_sphere(users, beam)});
    return plan;
}

int theorem1_lower_bound(int n_users) {
    if (n_users < 2) return 1;
    const int half = (n_users - 1 + 1) / 2;  // ceil((K-1)/2)
    return (n_users + half - 1) / half;      // ceil(K / half)
}

BeamPlan stage1(const std::vector<GeoPoint>& users, const CoverageGraph& g,
                const Stage1Options& opt) {
    if (static_cast<int>(users.size()) != g.n_users)
        throw std::invalid_argument("stage1: user list does not match graph");
    Stage1Options o = opt;
    if (o.max_clique_size <= 0) o.max_clique_size = std::min(g.n_users, 12);
    const CliqueCatalog cat = enumerate_cliques(g, o.max_clique_size, o.clique_budget);
    const auto candidates = expand_dictionary(cat, o);
    BeamPlan plan = select_min_beams(candidates, users);
    validate_plan(plan, g);
    return plan;
}

void validate_partition(const BeamPlan& plan, int n_users) {
    std::vector<int> seen(n_users, 0);
    if (plan.beams.empty())
        throw std::invalid_argument("BeamPlan: no beams");
    for (const Beam& b : plan.beams) {
        if (b.users.empty())
            throw std::invalid_argument("BeamPlan: empty beam");
        for (int u : b.users) {
            if (u < 0 || u >= n_users)
                throw std::invalid_argument("BeamPlan: user index out of range");
            if (seen[u]++)
                throw std::invalid_argument("BeamPlan: user " + std::to_string(u) +
                                            " assigned to multiple beams");
        }
    }
    for (int u = 0; u < n_users; ++u)
        if (!seen[u])
            throw std::invalid_argument("BeamPlan: user " + std::to_string(u) + " uncovered");
}

std::vector<std::pair<int, int>> infeasible_pairs(const BeamPlan& plan,
                                                  const CoverageGraph& g) {
    std::vector<std::pair<int, int>> bad;
    for (const Beam& b : plan.beams)
        for (std::size_t i = 0; i < b.users.size(); ++i)
            for (std::size_t j = i + 1; j < b.users.size(); ++j)
                if (!g.adjacent(b.users[i], b.users[j]))
                    bad.emplace_back(b.users[i], b.users[j]);
    return bad;
}

void validate_plan(const BeamPlan& plan, const CoverageGraph& g) {
    validate_partition(plan, g.n_users);
    const auto bad = infeasible_pairs(plan, g);
    if (!bad.empty())
        throw std::invalid_argument("BeamPlan: pair (" + std::to_string(bad[0].first) + "," +
                                    std::to_string(bad[0].second) +
                                    ") exceeds the half beamwidth");
}

std::vector<HpbwViolation> audit_hpbw(const BeamPlan& plan,
                                      const std::vector<GeoPoint>& users,
                                      const SatellitePose& sat,
                                      double half_power_angle_deg) {
    std::vector<HpbwViolation> out;
    for (int b = 0; b < plan.n_beams(); ++b) {
        for (int u : plan.beams[b].users) {
            const double theta = view_angle_deg(sat, plan.beams[b].center, users[u]);
            if (theta > half_power_angle_deg + 1e-12)
                out.push_back({b, u, theta, theta - half_power_angle_deg});
        }
    }
    return out;
}

}  // namespace beamplan
