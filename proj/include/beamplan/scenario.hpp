#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "beamplan/balancer.hpp"
#include "beamplan/coverage_graph.hpp"
#include "beamplan/geometry.hpp"
#include "beamplan/link_budget.hpp"
#include "beamplan/metrics.hpp"

namespace beamplan {

enum class Algorithm { TwoStage, Stage1Only, BeamAperture, HomoBalance };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& name);

/// Raised on malformed or inconsistent configuration input.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
    int n_users = 20;
    std::array<double, 2> lat_range{30.0, 40.0};
    std::array<double, 2> lon_range{-120.0, -110.0};
    GeoPoint satellite_position{0.0, -88.7};
    double satellite_altitude_km = 8063.0;
    LinkBudgetParams link;
    Weights weights;
    std::uint64_t seed = 1;
    int n_trials = 200;
    std::vector<Algorithm> algorithms{Algorithm::TwoStage, Algorithm::Stage1Only,
                                      Algorithm::BeamAperture, Algorithm::HomoBalance};
    int max_beams = 0;  // 0: no cap beyond n_users
    BalancerConfig balancer;
    Stage1Options stage1;
    int workers = 1;
    std::string load_gap_metric = "range";  // or "variance"
    std::vector<GeoPoint> fixed_users;      // overrides random generation

    SatellitePose satellite() const { return {satellite_position, satellite_altitude_km}; }
};

/// Throws ConfigError on any invalid field or combination.
void validate(const ScenarioConfig& cfg);

/// Canonical JSON form. Unknown keys are rejected.
ScenarioConfig parse_config_json(const std::string& text);

/// Line-based `key = value` dialect; see config_schema_help() for keys.
ScenarioConfig parse_config_text(const std::string& text);

/// Reads either dialect; JSON when the first non-space character is '{'.
ScenarioConfig load_config_file(const std::string& path);

nlohmann::ordered_json config_to_json(const ScenarioConfig& cfg);

std::string config_schema_help();

/// n_users points drawn i.i.d. uniform in the configured rectangle from the
/// (seed, trial) stream; fixed user coordinates take precedence when present.
std::vector<GeoPoint> generate_users(const ScenarioConfig& cfg, int trial);

struct RunResult {
    nlohmann::ordered_json document;              // run.json
    std::string per_user_csv;
    std::string summary_csv;
    std::map<std::string, std::string> cdf_csv;   // keyed by algorithm name
    bool max_beams_exceeded = false;
};

/// Executes every enabled algorithm on every trial and aggregates the
/// results. Trials run in parallel up to cfg.workers; output is a
/// deterministic function of the configuration.
RunResult run(const ScenarioConfig& cfg);

/// Writes run.json, per_user.csv, summary.csv and cdf_<algorithm>.csv into
/// out_dir (created if missing). Throws std::runtime_error on I/O failure.
void write_outputs(const RunResult& result, const std::string& out_dir);

/// Pinned 10-user demo layout whose adjacency structure drives the worked
/// example in the docs; used by the `example1` CLI subcommand and the tests.
const std::vector<GeoPoint>& example1_users();

}  // namespace beamplan
