#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "beamplan/balancer.hpp"
#include "beamplan/coverage_graph.hpp"
#include "beamplan/geometry.hpp"
#include "beamplan/link_budget.hpp"
#include "beamplan/metrics.hpp"
#include "beamplan/scenario.hpp"

namespace py = pybind11;
using namespace beamplan;

namespace {

std::vector<std::vector<int>> adjacency_rows(const CoverageGraph& g) {
    std::vector<std::vector<int>> rows(g.n_users, std::vector<int>(g.n_users, 0));
    for (int k = 0; k < g.n_users; ++k)
        for (int l = 0; l < g.n_users; ++l) rows[k][l] = g.adjacent(k, l) ? 1 : 0;
    return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Beam placement and load balancing for multi-beam satellites";

    py::class_<GeoPoint>(m, "GeoPoint")
        .def(py::init<double, double>(), py::arg("lat_deg"), py::arg("lon_deg"))
        .def_property_readonly("lat_deg", &GeoPoint::lat_deg)
        .def_property_readonly("lon_deg", &GeoPoint::lon_deg)
        .def("__repr__", [](const GeoPoint& p) {
            return "GeoPoint(" + std::to_string(p.lat_deg()) + ", " +
                   std::to_string(p.lon_deg()) + ")";
        });

    py::class_<EcefVector>(m, "EcefVector")
        .def(py::init([](double x, double y, double z) {
                 return EcefVector{x, y, z};
             }),
             py::arg("x_km"), py::arg("y_km"), py::arg("z_km"))
        .def_readwrite("x_km", &EcefVector::x_km)
        .def_readwrite("y_km", &EcefVector::y_km)
        .def_readwrite("z_km", &EcefVector::z_km)
        .def("norm", &EcefVector::norm);

    py::class_<SatellitePose>(m, "SatellitePose")
        .def(py::init<GeoPoint, double>(), py::arg("position"), py::arg("altitude_km"))
        .def_property_readonly("position", &SatellitePose::position)
        .def_property_readonly("altitude_km", &SatellitePose::altitude_km);

    m.attr("EARTH_RADIUS_KM") = kEarthRadiusKm;
    m.def("geo_to_ecef", &geo_to_ecef, py::arg("point"), py::arg("radius_km") = kEarthRadiusKm);
    m.def("ecef_to_geo", &ecef_to_geo, py::arg("v"));
    m.def("great_circle_distance_km", &great_circle_distance_km, py::arg("a"), py::arg("b"),
          py::arg("radius_km") = kEarthRadiusKm);
    m.def("view_angle_deg", &view_angle_deg, py::arg("sat"), py::arg("a"), py::arg("b"));
    m.def("slant_range_km", &slant_range_km, py::arg("sat"), py::arg("user"));

    py::class_<LinkBudgetParams>(m, "LinkBudgetParams")
        .def(py::init<>())
        .def_readwrite("carrier_freq_hz", &LinkBudgetParams::carrier_freq_hz)
        .def_readwrite("aperture_radius_over_lambda",
                       &LinkBudgetParams::aperture_radius_over_lambda)
        .def_readwrite("antenna_diameter_m", &LinkBudgetParams::antenna_diameter_m)
        .def_readwrite("antenna_efficiency", &LinkBudgetParams::antenna_efficiency)
        .def_readwrite("max_beam_gain_db", &LinkBudgetParams::max_beam_gain_db)
        .def_readwrite("atmospheric_loss_db", &LinkBudgetParams::atmospheric_loss_db)
        .def_readwrite("noise_power_dbw", &LinkBudgetParams::noise_power_dbw)
        .def_readwrite("total_power_dbw", &LinkBudgetParams::total_power_dbw)
        .def_readwrite("half_beamwidth_deg", &LinkBudgetParams::half_beamwidth_deg)
        .def("wavelength_m", &LinkBudgetParams::wavelength_m);

    m.def("bessel_j1", &bessel_j1, py::arg("x"));
    m.def("normalized_gain", &normalized_gain, py::arg("theta_deg"), py::arg("params"));
    m.def("beam_gain_db", &beam_gain_db, py::arg("theta_deg"), py::arg("params"));
    m.def("free_space_path_loss_db", &free_space_path_loss_db, py::arg("slant_range_km"),
          py::arg("params"));
    m.def("receive_gain_db", &receive_gain_db, py::arg("params"));
    m.def("statistical_channel_gain_db", &statistical_channel_gain_db, py::arg("theta_deg"),
          py::arg("slant_range_km"), py::arg("params"));
    m.def("cnr_db", &cnr_db, py::arg("theta_deg"), py::arg("slant_range_km"),
          py::arg("power_dbw"), py::arg("params"));
    m.def("half_power_angle_deg", &half_power_angle_deg, py::arg("params"));
    m.def("first_null_angle_deg", &first_null_angle_deg, py::arg("params"));

    py::class_<CoverageGraph>(m, "CoverageGraph")
        .def_readonly("n_users", &CoverageGraph::n_users)
        .def_readonly("half_beamwidth_deg", &CoverageGraph::half_beamwidth_deg)
        .def("adjacent", &CoverageGraph::adjacent, py::arg("k"), py::arg("l"))
        .def("angle", &CoverageGraph::angle, py::arg("k"), py::arg("l"))
        .def("adjacency_matrix", &adjacency_rows)
        .def_static("from_adjacency", &CoverageGraph::from_adjacency, py::arg("matrix"),
                    py::arg("half_beamwidth_deg") = 1.0);

    m.def("build_graph", &build_graph, py::arg("users"), py::arg("sat"),
          py::arg("half_beamwidth_deg"));

    py::class_<CliqueCatalog>(m, "CliqueCatalog")
        .def_readonly("max_size", &CliqueCatalog::max_size)
        .def_readonly("truncated", &CliqueCatalog::truncated)
        .def("of_size", &CliqueCatalog::of_size, py::arg("size"));

    py::class_<Stage1Options>(m, "Stage1Options")
        .def(py::init<>())
        .def_readwrite("max_clique_size", &Stage1Options::max_clique_size)
        .def_readwrite("candidate_cap", &Stage1Options::candidate_cap)
        .def_readwrite("clique_budget", &Stage1Options::clique_budget)
        .def_readwrite("family_limit", &Stage1Options::family_limit);

    m.def("enumerate_cliques", &enumerate_cliques, py::arg("graph"),
          py::arg("max_clique_size"), py::arg("clique_budget") = 500000);
    m.def("expand_dictionary", &expand_dictionary, py::arg("catalog"),
          py::arg("options") = Stage1Options{});
    m.def("theorem1_lower_bound", &theorem1_lower_bound, py::arg("n_users"));

    py::class_<Beam>(m, "Beam")
        .def_readonly("users", &Beam::users)
        .def_readonly("center", &Beam::center);

    py::class_<BeamPlan>(m, "BeamPlan")
        .def_readonly("beams", &BeamPlan::beams)
        .def_property_readonly("n_beams", &BeamPlan::n_beams);

    m.def("select_min_beams", &select_min_beams, py::arg("candidates"), py::arg("users"));
    m.def("stage1", &stage1, py::arg("users"), py::arg("graph"),
          py::arg("options") = Stage1Options{});

    py::class_<BalancerConfig>(m, "BalancerConfig")
        .def(py::init<>())
        .def_readwrite("restart_budget", &BalancerConfig::restart_budget)
        .def_readwrite("max_iterations", &BalancerConfig::max_iterations)
        .def_readwrite("seed", &BalancerConfig::seed);

    py::class_<RefineResult>(m, "RefineResult")
        .def_readonly("plan", &RefineResult::plan)
        .def_readonly("fell_back", &RefineResult::fell_back)
        .def_readonly("restart_index", &RefineResult::restart_index)
        .def_readonly("inertia_km2", &RefineResult::inertia_km2)
        .def_readonly("input_inertia_km2", &RefineResult::input_inertia_km2);

    m.def("refine", &refine, py::arg("plan"), py::arg("users"), py::arg("graph"),
          py::arg("config") = BalancerConfig{});
    m.def("feasibility_check", &feasibility_check, py::arg("assignment"), py::arg("graph"));

    py::class_<Weights>(m, "Weights")
        .def(py::init([](double distance, double beam_count) {
                 return Weights{distance, beam_count};
             }),
             py::arg("distance") = 0.5, py::arg("beam_count") = 0.5)
        .def_readwrite("distance", &Weights::distance)
        .def_readwrite("beam_count", &Weights::beam_count);

    py::class_<PerUserMetrics>(m, "PerUserMetrics")
        .def_readonly("user", &PerUserMetrics::user)
        .def_readonly("beam", &PerUserMetrics::beam)
        .def_readonly("theta_deg", &PerUserMetrics::theta_deg)
        .def_readonly("scgnr_db", &PerUserMetrics::scgnr_db)
        .def_readonly("cnr_db", &PerUserMetrics::cnr_db);

    py::class_<EvaluationReport>(m, "EvaluationReport")
        .def_readonly("per_user", &EvaluationReport::per_user)
        .def_readonly("min_cnr_db", &EvaluationReport::min_cnr_db)
        .def_readonly("avg_cnr_db", &EvaluationReport::avg_cnr_db)
        .def_readonly("load_gap", &EvaluationReport::load_gap)
        .def_readonly("load_variance", &EvaluationReport::load_variance)
        .def_readonly("n_beams", &EvaluationReport::n_beams)
        .def_readonly("weighted_objective", &EvaluationReport::weighted_objective)
        .def_readonly("cdf_points", &EvaluationReport::cdf_points);

    m.def("evaluate", &evaluate, py::arg("plan"), py::arg("users"), py::arg("sat"),
          py::arg("params"), py::arg("weights"));
    m.def("beam_aperture_baseline", &beam_aperture_baseline, py::arg("users"), py::arg("sat"),
          py::arg("half_beamwidth_deg"));
    m.def("homogeneous_balance_baseline", &homogeneous_balance_baseline, py::arg("users"),
          py::arg("n_beams"));
    m.def("load_gap", &load_gap, py::arg("plan"));

    m.def("parse_config_json", &parse_config_json, py::arg("text"));
    m.def("load_config_file", &load_config_file, py::arg("path"));
    m.def("config_schema_help", &config_schema_help);
    m.def("example1_users", [] { return example1_users(); });
    m.def(
        "run_scenario",
        [](const std::string& config_json) {
            const RunResult result = run(parse_config_json(config_json));
            return result.document.dump();
        },
        py::arg("config_json"),
        "Run a scenario from a JSON config string; returns the run document as JSON text");
    m.def(
        "run_scenario_to_dir",
        [](const std::string& config_json, const std::string& out_dir) {
            const RunResult result = run(parse_config_json(config_json));
            write_outputs(result, out_dir);
            return result.max_beams_exceeded;
        },
        py::arg("config_json"), py::arg("out_dir"));

#ifdef BEAMPLAN_VERSION
    m.attr("__version__") = BEAMPLAN_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}
