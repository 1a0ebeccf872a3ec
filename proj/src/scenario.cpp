#include "beamplan/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "beamplan/prng.hpp"

namespace beamplan {

namespace {

int log_level() {
    static const int level = [] {
        const char* env = std::getenv("BEAM_LOG");
        if (!env) return 0;
        std::string v(env);
        std::transform(v.begin(), v.end(), v.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        if (v == "2" || v == "debug") return 2;
        if (v == "1" || v == "info") return 1;
        return 0;
    }();
    return level;
}

template <typename... Args>
void log_info(const char* fmt, Args... args) {
    if (log_level() >= 1) {
        std::fprintf(stderr, "[beamplan] ");
        std::fprintf(stderr, fmt, args...);
        std::fprintf(stderr, "\n");
    }
}

template <typename... Args>
void log_debug(const char* fmt, Args... args) {
    if (log_level() >= 2) {
        std::fprintf(stderr, "[beamplan] ");
        std::fprintf(stderr, fmt, args...);
        std::fprintf(stderr, "\n");
    }
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

const std::vector<Algorithm>& all_algorithms() {
    static const std::vector<Algorithm> all{Algorithm::TwoStage, Algorithm::Stage1Only,
                                            Algorithm::BeamAperture, Algorithm::HomoBalance};
    return all;
}

}  // namespace

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::TwoStage: return "two_stage";
        case Algorithm::Stage1Only: return "stage1_only";
        case Algorithm::BeamAperture: return "beam_aperture";
        case Algorithm::HomoBalance: return "homo_balance";
    }
    return "unknown";
}

Algorithm algorithm_from_string(const std::string& name) {
    for (Algorithm a : all_algorithms())
        if (to_string(a) == name) return a;
    throw ConfigError("unknown algorithm '" + name + "'");
}

void validate(const ScenarioConfig& cfg) {
    if (cfg.n_users < 1) throw ConfigError("n_users must be >= 1");
    if (cfg.n_trials < 1) throw ConfigError("n_trials must be >= 1");
    if (cfg.workers < 1) throw ConfigError("workers must be >= 1");
    if (cfg.max_beams < 0) throw ConfigError("max_beams must be >= 0");
    if (cfg.fixed_users.empty()) {
        if (!(cfg.lat_range[0] <= cfg.lat_range[1]))
            throw ConfigError("lat_range is inverted");
        if (!(cfg.lon_range[0] <= cfg.lon_range[1]))
            throw ConfigError("lon_range is inverted");
        if (cfg.lat_range[0] < -90.0 || cfg.lat_range[1] > 90.0)
            throw ConfigError("lat_range outside [-90, 90]");
        if (cfg.lon_range[0] < -180.0 || cfg.lon_range[1] > 180.0)
            throw ConfigError("lon_range outside [-180, 180]");
    } else if (static_cast<int>(cfg.fixed_users.size()) != cfg.n_users) {
        throw ConfigError("n_users does not match the fixed user list");
    }
    if (!(cfg.satellite_altitude_km > 0.0))
        throw ConfigError("satellite altitude must be > 0");
    if (cfg.algorithms.empty()) throw ConfigError("no algorithms enabled");
    if (cfg.load_gap_metric != "range" && cfg.load_gap_metric != "variance")
        throw ConfigError("load_gap_metric must be 'range' or 'variance'");
    if (cfg.balancer.restart_budget < 1)
        throw ConfigError("balancer.restart_budget must be >= 1");
    if (cfg.balancer.max_iterations < 1)
        throw ConfigError("balancer.max_iterations must be >= 1");
    if (cfg.stage1.candidate_cap < 1) throw ConfigError("stage1.candidate_cap must be >= 1");
    if (cfg.stage1.family_limit < 1) throw ConfigError("stage1.family_limit must be >= 1");
    if (cfg.stage1.clique_budget < cfg.n_users)
        throw ConfigError("stage1.clique_budget must cover at least the singletons");
    try {
        validate(cfg.link);
        validate(cfg.weights);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

namespace {

double require_number(const nlohmann::json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError("'" + key + "' must be a number");
    return v.get<double>();
}

int require_int(const nlohmann::json& v, const std::string& key) {
    if (!v.is_number_integer()) throw ConfigError("'" + key + "' must be an integer");
    return v.get<int>();
}

std::array<double, 2> require_range(const nlohmann::json& v, const std::string& key) {
    if (!v.is_array() || v.size() != 2)
        throw ConfigError("'" + key + "' must be a [lo, hi] pair");
    return {require_number(v[0], key), require_number(v[1], key)};
}

void apply_link(const nlohmann::json& obj, LinkBudgetParams& link) {
    for (const auto& [key, value] : obj.items()) {
        if (key == "carrier_freq_ghz") link.carrier_freq_hz = require_number(value, key) * 1e9;
        else if (key == "carrier_freq_hz") link.carrier_freq_hz = require_number(value, key);
        else if (key == "aperture_radius_over_lambda")
            link.aperture_radius_over_lambda = require_number(value, key);
        else if (key == "antenna_diameter_m") link.antenna_diameter_m = require_number(value, key);
        else if (key == "antenna_efficiency") link.antenna_efficiency = require_number(value, key);
        else if (key == "max_beam_gain_db") link.max_beam_gain_db = require_number(value, key);
        else if (key == "atmospheric_loss_db")
            link.atmospheric_loss_db = require_number(value, key);
        else if (key == "noise_power_dbw") link.noise_power_dbw = require_number(value, key);
        else if (key == "total_power_dbw") link.total_power_dbw = require_number(value, key);
        else if (key == "half_beamwidth_deg") link.half_beamwidth_deg = require_number(value, key);
        else throw ConfigError("unknown key 'link." + key + "'");
    }
}

void apply_satellite(const nlohmann::json& obj, ScenarioConfig& cfg) {
    double lat = cfg.satellite_position.lat_deg();
    double lon = cfg.satellite_position.lon_deg();
    for (const auto& [key, value] : obj.items()) {
        if (key == "lat") lat = require_number(value, key);
        else if (key == "lon") lon = require_number(value, key);
        else if (key == "altitude_km") cfg.satellite_altitude_km = require_number(value, key);
        else throw ConfigError("unknown key 'satellite." + key + "'");
    }
    try {
        cfg.satellite_position = GeoPoint(lat, lon);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

void apply_balancer(const nlohmann::json& obj, BalancerConfig& b) {
    for (const auto& [key, value] : obj.items()) {
        if (key == "restart_budget") b.restart_budget = require_int(value, key);
        else if (key == "max_iterations") b.max_iterations = require_int(value, key);
        else if (key == "seed") b.seed = value.get<std::uint64_t>();
        else throw ConfigError("unknown key 'balancer." + key + "'");
    }
}

void apply_stage1(const nlohmann::json& obj, Stage1Options& s) {
    for (const auto& [key, value] : obj.items()) {
        if (key == "max_clique_size") s.max_clique_size = require_int(value, key);
        else if (key == "candidate_cap") s.candidate_cap = require_int(value, key);
        else if (key == "clique_budget") s.clique_budget = value.get<long long>();
        else if (key == "family_limit") s.family_limit = require_int(value, key);
        else throw ConfigError("unknown key 'stage1." + key + "'");
    }
}

ScenarioConfig config_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("config root must be an object");
    ScenarioConfig cfg;
    bool explicit_n_users = false;
    for (const auto& [key, value] : doc.items()) {
        if (key == "n_users") {
            cfg.n_users = require_int(value, key);
            explicit_n_users = true;
        } else if (key == "lat_range") cfg.lat_range = require_range(value, key);
        else if (key == "lon_range") cfg.lon_range = require_range(value, key);
        else if (key == "satellite") apply_satellite(value, cfg);
        else if (key == "link") apply_link(value, cfg.link);
        else if (key == "weights") {
            const auto pair = require_range(value, key);
            cfg.weights = {pair[0], pair[1]};
        } else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
        else if (key == "n_trials") cfg.n_trials = require_int(value, key);
        else if (key == "algorithms") {
            if (!value.is_array()) throw ConfigError("'algorithms' must be an array");
            cfg.algorithms.clear();
            for (const auto& name : value)
                cfg.algorithms.push_back(algorithm_from_string(name.get<std::string>()));
        } else if (key == "max_beams") cfg.max_beams = require_int(value, key);
        else if (key == "balancer") apply_balancer(value, cfg.balancer);
        else if (key == "stage1") apply_stage1(value, cfg.stage1);
        else if (key == "workers") cfg.workers = require_int(value, key);
        else if (key == "load_gap_metric") cfg.load_gap_metric = value.get<std::string>();
        else if (key == "users") {
            if (!value.is_array()) throw ConfigError("'users' must be an array of [lat, lon]");
            cfg.fixed_users.clear();
            for (const auto& u : value) {
                const auto pair = require_range(u, "users[]");
                try {
                    cfg.fixed_users.emplace_back(pair[0], pair[1]);
                } catch (const std::invalid_argument& e) {
                    throw ConfigError(e.what());
                }
            }
        } else {
            throw ConfigError("unknown key '" + key + "'");
        }
    }
    if (!cfg.fixed_users.empty() && !explicit_n_users)
        cfg.n_users = static_cast<int>(cfg.fixed_users.size());
    validate(cfg);
    return cfg;
}

}  // namespace

ScenarioConfig parse_config_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("JSON parse error: ") + e.what());
    }
    return config_from_json(doc);
}

ScenarioConfig parse_config_text(const std::string& text) {
    nlohmann::json doc = nlohmann::json::object();
    std::istringstream in(text);
    std::string line;
    int line_no = 0;

    auto parse_num = [&](const std::string& token) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(token, &pos);
            if (pos != token.size()) throw std::invalid_argument(token);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("line " + std::to_string(line_no) + ": bad number '" + token +
                              "'");
        }
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const auto eq = line.find('=');
        std::string key = line.substr(0, eq == std::string::npos ? line.size() : eq);
        key.erase(0, key.find_first_not_of(" \t\r"));
        key.erase(key.find_last_not_of(" \t\r") + 1);
        if (key.empty()) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw ConfigError("line " + std::to_string(line_no) + ": missing key");
            continue;
        }
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");

        std::vector<std::string> tokens;
        std::istringstream vs(line.substr(eq + 1));
        for (std::string tok; vs >> tok;) tokens.push_back(tok);
        if (tokens.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": empty value for '" + key +
                              "'");

        auto want = [&](std::size_t n) {
            if (tokens.size() != n)
                throw ConfigError("line " + std::to_string(line_no) + ": '" + key + "' expects " +
                                  std::to_string(n) + " value(s)");
        };

        if (key == "n_users" || key == "n_trials" || key == "max_beams" || key == "workers") {
            want(1);
            doc[key] = static_cast<long long>(parse_num(tokens[0]));
        } else if (key == "seed") {
            want(1);
            doc[key] = static_cast<std::uint64_t>(std::stoull(tokens[0]));
        } else if (key == "lat_range" || key == "lon_range" || key == "weights") {
            want(2);
            doc[key] = {parse_num(tokens[0]), parse_num(tokens[1])};
        } else if (key == "satellite") {
            want(3);
            doc[key] = {{"lat", parse_num(tokens[0])},
                        {"lon", parse_num(tokens[1])},
                        {"altitude_km", parse_num(tokens[2])}};
        } else if (key == "algorithms") {
            doc[key] = tokens;
        } else if (key == "load_gap_metric") {
            want(1);
            doc[key] = tokens[0];
        } else if (key == "user") {
            want(2);
            if (!doc.contains("users")) doc["users"] = nlohmann::json::array();
            doc["users"].push_back({parse_num(tokens[0]), parse_num(tokens[1])});
        } else if (key.rfind("link.", 0) == 0 || key.rfind("balancer.", 0) == 0 ||
                   key.rfind("stage1.", 0) == 0) {
            want(1);
            const auto dotpos = key.find('.');
            const std::string section = key.substr(0, dotpos);
            const std::string field = key.substr(dotpos + 1);
            if (field == "seed" || field == "clique_budget")
                doc[section][field] = static_cast<long long>(parse_num(tokens[0]));
            else if (field == "restart_budget" || field == "max_iterations" ||
                     field == "max_clique_size" || field == "candidate_cap" ||
                     field == "family_limit")
                doc[section][field] = static_cast<long long>(parse_num(tokens[0]));
            else
                doc[section][field] = parse_num(tokens[0]);
        } else {
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    return config_from_json(doc);
}

ScenarioConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') return parse_config_json(text);
    return parse_config_text(text);
}

nlohmann::ordered_json config_to_json(const ScenarioConfig& cfg) {
    nlohmann::ordered_json j;
    j["n_users"] = cfg.n_users;
    j["lat_range"] = cfg.lat_range;
    j["lon_range"] = cfg.lon_range;
    j["satellite"] = {{"lat", cfg.satellite_position.lat_deg()},
                      {"lon", cfg.satellite_position.lon_deg()},
                      {"altitude_km", cfg.satellite_altitude_km}};
    j["link"] = {{"carrier_freq_hz", cfg.link.carrier_freq_hz},
                 {"aperture_radius_over_lambda", cfg.link.aperture_radius_over_lambda},
                 {"antenna_diameter_m", cfg.link.antenna_diameter_m},
                 {"antenna_efficiency", cfg.link.antenna_efficiency},
                 {"max_beam_gain_db", cfg.link.max_beam_gain_db},
                 {"atmospheric_loss_db", cfg.link.atmospheric_loss_db},
                 {"noise_power_dbw", cfg.link.noise_power_dbw},
                 {"total_power_dbw", cfg.link.total_power_dbw},
                 {"half_beamwidth_deg", cfg.link.half_beamwidth_deg}};
    j["weights"] = {cfg.weights.distance, cfg.weights.beam_count};
    j["seed"] = cfg.seed;
    j["n_trials"] = cfg.n_trials;
    nlohmann::ordered_json algos = nlohmann::ordered_json::array();
    for (Algorithm a : cfg.algorithms) algos.push_back(to_string(a));
    j["algorithms"] = algos;
    j["max_beams"] = cfg.max_beams;
    j["balancer"] = {{"restart_budget", cfg.balancer.restart_budget},
                     {"max_iterations", cfg.balancer.max_iterations},
                     {"seed", cfg.balancer.seed}};
    j["stage1"] = {{"max_clique_size", cfg.stage1.max_clique_size},
                   {"candidate_cap", cfg.stage1.candidate_cap},
                   {"clique_budget", cfg.stage1.clique_budget},
                   {"family_limit", cfg.stage1.family_limit}};
    j["workers"] = cfg.workers;
    j["load_gap_metric"] = cfg.load_gap_metric;
    if (!cfg.fixed_users.empty()) {
        nlohmann::ordered_json users = nlohmann::ordered_json::array();
        for (const GeoPoint& p : cfg.fixed_users)
            users.push_back({p.lat_deg(), p.lon_deg()});
        j["users"] = users;
    }
    return j;
}

std::string config_schema_help() {
    return R"(Scenario configuration keys (JSON object or `key = value` lines):
  n_users            number of users per trial (default 20)
  lat_range          [lo, hi] degrees (default [30, 40])
  lon_range          [lo, hi] degrees (default [-120, -110])
  satellite          {lat, lon, altitude_km} (default {0, -88.7, 8063})
  link.carrier_freq_ghz | carrier_freq_hz      (default 18.05 GHz)
  link.aperture_radius_over_lambda             (default 5)
  link.antenna_diameter_m                      (default 0.6)
  link.antenna_efficiency                      (default 0.6)
  link.max_beam_gain_db                        (default 50)
  link.atmospheric_loss_db                     (default 0.5)
  link.noise_power_dbw                         (default -118)
  link.total_power_dbw                         (default 23.5)
  link.half_beamwidth_deg                      (default 1.6)
  weights            [distance, beam_count], must sum to 1 (default [0.5, 0.5])
  seed               64-bit trial stream seed (default 1)
  n_trials           Monte-Carlo trials (default 200)
  algorithms         subset of two_stage stage1_only beam_aperture homo_balance
  max_beams          beam budget; 0 disables the explicit cap (default 0)
  balancer.restart_budget | max_iterations | seed
  stage1.max_clique_size | candidate_cap | clique_budget | family_limit
  workers            parallel trial workers (default 1)
  load_gap_metric    'range' (max-min) or 'variance'
  users / user       explicit [lat, lon] coordinates, overriding random draws
In the text dialect multi-value keys take whitespace-separated values, and
`user = lat lon` may repeat, one line per fixed user.)";
}

std::vector<GeoPoint> generate_users(const ScenarioConfig& cfg, int trial) {
    validate(cfg);
    if (trial < 0) throw std::invalid_argument("generate_users: trial must be >= 0");
    if (!cfg.fixed_users.empty()) return cfg.fixed_users;

    Prng rng(cfg.seed, static_cast<std::uint64_t>(trial));
    std::vector<GeoPoint> users;
    users.reserve(cfg.n_users);
    for (int i = 0; i < cfg.n_users; ++i) {
        const double lat = rng.uniform(cfg.lat_range[0], cfg.lat_range[1]);
        const double lon = rng.uniform(cfg.lon_range[0], cfg.lon_range[1]);
        users.emplace_back(lat, lon);
    }
    return users;
}

namespace {

struct AlgoTrial {
    BeamPlan plan;
    EvaluationReport report;
    bool fallback = false;
    int restart_index = -1;
    double inertia_km2 = 0.0;
    double input_inertia_km2 = 0.0;
    int hpbw_violations = 0;
    bool over_cap = false;
};

struct TrialRecord {
    std::vector<GeoPoint> users;
    int lower_bound = 0;
    std::vector<std::pair<Algorithm, AlgoTrial>> per_algo;
    nlohmann::ordered_json json;
};

nlohmann::ordered_json plan_to_json(const BeamPlan& plan) {
    nlohmann::ordered_json beams = nlohmann::ordered_json::array();
    for (const Beam& b : plan.beams) {
        nlohmann::ordered_json jb;
        jb["users"] = b.users;
        jb["center"] = {b.center.lat_deg(), b.center.lon_deg()};
        beams.push_back(std::move(jb));
    }
    return beams;
}

nlohmann::ordered_json report_to_json(const EvaluationReport& r) {
    nlohmann::ordered_json j;
    j["min_cnr_db"] = r.min_cnr_db;
    j["avg_cnr_db"] = r.avg_cnr_db;
    j["load_gap"] = r.load_gap;
    j["load_variance"] = r.load_variance;
    j["n_beams"] = r.n_beams;
    j["weighted_objective"] = r.weighted_objective;
    return j;
}

TrialRecord run_trial(const ScenarioConfig& cfg, int trial, int beam_cap,
                      double half_power_deg) {
    TrialRecord rec;
    rec.users = generate_users(cfg, trial);
    const SatellitePose sat = cfg.satellite();
    const CoverageGraph graph = build_graph(rec.users, sat, cfg.link.half_beamwidth_deg);
    rec.lower_bound = theorem1_lower_bound(cfg.n_users);

    const bool needs_stage1 =
        std::any_of(cfg.algorithms.begin(), cfg.algorithms.end(), [](Algorithm a) {
            return a == Algorithm::TwoStage || a == Algorithm::Stage1Only ||
                   a == Algorithm::HomoBalance;
        });

    BeamPlan stage1_plan;
    RefineResult refined;
    bool have_refined = false;
    if (needs_stage1) stage1_plan = stage1(rec.users, graph, cfg.stage1);

    for (Algorithm a : cfg.algorithms) {
        AlgoTrial at;
        switch (a) {
            case Algorithm::Stage1Only:
                at.plan = stage1_plan;
                break;
            case Algorithm::TwoStage: {
                refined = refine(stage1_plan, rec.users, graph, cfg.balancer);
                have_refined = true;
                at.plan = refined.plan;
                at.fallback = refined.fell_back;
                at.restart_index = refined.restart_index;
                at.inertia_km2 = refined.inertia_km2;
                at.input_inertia_km2 = refined.input_inertia_km2;
                break;
            }
            case Algorithm::BeamAperture:
                at.plan = beam_aperture_baseline(rec.users, sat, cfg.link.half_beamwidth_deg);
                break;
            case Algorithm::HomoBalance:
                at.plan = homogeneous_balance_baseline(rec.users, stage1_plan.n_beams());
                break;
        }
        at.report = evaluate(at.plan, rec.users, sat, cfg.link, cfg.weights);
        at.hpbw_violations = static_cast<int>(
            audit_hpbw(at.plan, rec.users, sat, half_power_deg).size());
        at.over_cap = at.plan.n_beams() > beam_cap;
        if (at.over_cap)
            log_info("trial %d: %s uses %d beams, budget %d", trial, to_string(a).c_str(),
                     at.plan.n_beams(), beam_cap);
        if (a == Algorithm::TwoStage && at.fallback)
            log_debug("trial %d: two_stage fell back to the first-stage plan", trial);
        rec.per_algo.emplace_back(a, std::move(at));
    }

    // Serialize inside the trial so plans are re-validated while the graph
    // is still available.
    nlohmann::ordered_json jt;
    jt["trial"] = trial;
    nlohmann::ordered_json jusers = nlohmann::ordered_json::array();
    for (const GeoPoint& p : rec.users) jusers.push_back({p.lat_deg(), p.lon_deg()});
    jt["users"] = jusers;
    jt["beam_count_lower_bound"] = rec.lower_bound;
    nlohmann::ordered_json jalgos;
    for (const auto& [a, at] : rec.per_algo) {
        validate_partition(at.plan, cfg.n_users);
        if (a == Algorithm::TwoStage || a == Algorithm::Stage1Only)
            validate_plan(at.plan, graph);
        nlohmann::ordered_json ja;
        ja["n_beams"] = at.plan.n_beams();
        ja["beams"] = plan_to_json(at.plan);
        ja["metrics"] = report_to_json(at.report);
        ja["hpbw_violations"] = at.hpbw_violations;
        ja["max_beams_exceeded"] = at.over_cap;
        if (a == Algorithm::TwoStage) {
            ja["fallback"] = at.fallback;
            ja["restart_index"] = at.restart_index;
            ja["inertia_km2"] = at.inertia_km2;
            ja["input_inertia_km2"] = at.input_inertia_km2;
        }
        jalgos[to_string(a)] = std::move(ja);
    }
    jt["algorithms"] = std::move(jalgos);
    rec.json = std::move(jt);
    (void)have_refined;
    return rec;
}

std::string iso_timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

RunResult run(const ScenarioConfig& cfg) {
    validate(cfg);
    const int beam_cap = cfg.max_beams > 0 ? cfg.max_beams : cfg.n_users;
    const double half_power_deg = half_power_angle_deg(cfg.link);

    log_info("run: %d trial(s), %d user(s), %zu algorithm(s), %d worker(s)", cfg.n_trials,
             cfg.n_users, cfg.algorithms.size(), cfg.workers);

    std::vector<TrialRecord> trials(static_cast<std::size_t>(cfg.n_trials));
    {
        std::atomic<int> next{0};
        std::mutex err_mutex;
        std::exception_ptr first_error;
        const int n_workers = std::min(cfg.workers, cfg.n_trials);
        auto worker = [&] {
            for (;;) {
                const int t = next.fetch_add(1);
                if (t >= cfg.n_trials) return;
                try {
                    trials[static_cast<std::size_t>(t)] =
                        run_trial(cfg, t, beam_cap, half_power_deg);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        };
        if (n_workers <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            pool.reserve(static_cast<std::size_t>(n_workers));
            for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
            for (auto& th : pool) th.join();
        }
        if (first_error) std::rethrow_exception(first_error);
    }

    RunResult result;
    nlohmann::ordered_json doc;
    doc["schema"] = "beamplan/run/v1";
    doc["generated_at"] = iso_timestamp_utc();
    doc["config"] = config_to_json(cfg);

    // Deterministic fold over trial index order.
    nlohmann::ordered_json aggregates;
    for (Algorithm a : cfg.algorithms) {
        double min_cnr = 0.0, avg_cnr = 0.0, gap = 0.0, beams = 0.0, objective = 0.0;
        int fallbacks = 0, hpbw = 0, over_cap = 0;
        std::vector<double> pooled;
        for (const TrialRecord& rec : trials) {
            const AlgoTrial* at = nullptr;
            for (const auto& [algo, data] : rec.per_algo)
                if (algo == a) at = &data;
            min_cnr += at->report.min_cnr_db;
            avg_cnr += at->report.avg_cnr_db;
            gap += (cfg.load_gap_metric == "variance") ? at->report.load_variance
                                                       : at->report.load_gap;
            beams += at->report.n_beams;
            objective += at->report.weighted_objective;
            fallbacks += at->fallback ? 1 : 0;
            hpbw += at->hpbw_violations;
            over_cap += at->over_cap ? 1 : 0;
            pooled.insert(pooled.end(), at->report.cdf_points.begin(),
                          at->report.cdf_points.end());
        }
        const double nt = static_cast<double>(cfg.n_trials);
        std::sort(pooled.begin(), pooled.end());
        nlohmann::ordered_json ja;
        ja["K"] = cfg.n_users;
        ja["min_cnr_db"] = min_cnr / nt;
        ja["avg_cnr_db"] = avg_cnr / nt;
        ja["avg_load_gap"] = gap / nt;
        ja["avg_n_beams"] = beams / nt;
        ja["avg_weighted_objective"] = objective / nt;
        ja["hpbw_violation_count"] = hpbw;
        ja["max_beams_exceeded_trials"] = over_cap;
        if (a == Algorithm::TwoStage) ja["fallback_trials"] = fallbacks;
        ja["scgnr_cdf"] = pooled;
        aggregates[to_string(a)] = std::move(ja);
        if (over_cap > 0) result.max_beams_exceeded = true;

        std::string csv = "scgnr_db,cdf\n";
        for (std::size_t i = 0; i < pooled.size(); ++i) {
            csv += fmt_double(pooled[i]);
            csv += ',';
            csv += fmt_double(static_cast<double>(i + 1) / static_cast<double>(pooled.size()));
            csv += '\n';
        }
        result.cdf_csv[to_string(a)] = std::move(csv);
    }
    doc["aggregates"] = std::move(aggregates);

    nlohmann::ordered_json jtrials = nlohmann::ordered_json::array();
    for (TrialRecord& rec : trials) jtrials.push_back(std::move(rec.json));
    doc["trials"] = std::move(jtrials);
    result.document = std::move(doc);

    // Flat CSVs.
    std::string per_user = "trial,algorithm,user,beam,theta_deg,scgnr_db,cnr_db\n";
    for (int t = 0; t < cfg.n_trials; ++t) {
        for (const auto& [a, at] : trials[static_cast<std::size_t>(t)].per_algo) {
            const std::string name = to_string(a);
            for (const PerUserMetrics& pu : at.report.per_user) {
                per_user += std::to_string(t) + ',' + name + ',' + std::to_string(pu.user) +
                            ',' + std::to_string(pu.beam) + ',' + fmt_double(pu.theta_deg) +
                            ',' + fmt_double(pu.scgnr_db) + ',' + fmt_double(pu.cnr_db) + '\n';
            }
        }
    }
    result.per_user_csv = std::move(per_user);

    std::string summary = "algorithm,K,min_cnr_db,avg_cnr_db,avg_load_gap,avg_n_beams\n";
    for (Algorithm a : cfg.algorithms) {
        const auto& ja = result.document["aggregates"][to_string(a)];
        summary += to_string(a) + ',' + std::to_string(cfg.n_users) + ',' +
                   fmt_double(ja["min_cnr_db"].get<double>()) + ',' +
                   fmt_double(ja["avg_cnr_db"].get<double>()) + ',' +
                   fmt_double(ja["avg_load_gap"].get<double>()) + ',' +
                   fmt_double(ja["avg_n_beams"].get<double>()) + '\n';
    }
    result.summary_csv = std::move(summary);
    return result;
}

void write_outputs(const RunResult& result, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + out_dir + "'");

    auto write_file = [&](const std::string& name, const std::string& content) {
        const fs::path path = fs::path(out_dir) / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
        out << content;
        if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
    };

    write_file("run.json", result.document.dump(2) + "\n");
    write_file("per_user.csv", result.per_user_csv);
    write_file("summary.csv", result.summary_csv);
    for (const auto& [algo, csv] : result.cdf_csv) write_file("cdf_" + algo + ".csv", csv);
    log_info("wrote outputs to %s", out_dir.c_str());
}

const std::vector<GeoPoint>& example1_users() {
    static const std::vector<GeoPoint> users = {
        {34.28882672685338, -114.38857462930926},
        {38.222413458058419, -123.14440671429713},
        {35.864823293999791, -116.68030414557116},
        {32.359562539681406, -115.00448702642876},
        {30.562269539440244, -112.6987023426959},
        {41.482086376569541, -121.79408876455007},
        {31.574190991044738, -110.48875567039502},
        {41.436407441370157, -126.96987067954109},
        {31.461324202539892, -117.9586107492068},
        {39.51881620592107, -128.7507536902134},
    };
    return users;
}

}  // namespace beamplan
