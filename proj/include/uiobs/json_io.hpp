#pragma once

#include <optional>
#include <ostream>
#include <string>

#include <json.hpp>

#include "uiobs/sim.hpp"

namespace uiobs {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& M);  // row-major nested arrays
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const std::string& name);
Eigen::VectorXd vector_from_json(const nlohmann::json& j, const std::string& name);

LtiSystem system_from_json(const nlohmann::json& j);
nlohmann::json system_to_json(const LtiSystem& sys);

nlohmann::json normalform_to_json(const NormalFormResult& nf);

/// Raw scenario description as stored on disk; the CLI resolves it into a
/// Scenario after running the transformation.
struct ScenarioFile {
    LtiSystem system;
    Eigen::VectorXd x0;
    std::optional<Eigen::VectorXd> xhat0;  // transformed coordinates; default 0
    std::vector<SignalSpec> disturbance;
    std::vector<SignalSpec> open_loop;
    std::optional<FeedbackSpec> feedback;
    double step = 1e-4;
    double horizon = 10.0;
    std::optional<std::vector<std::vector<double>>> gains;
    InjectionKind injection = InjectionKind::Discontinuous;
    double q = -0.5;
    std::optional<double> ddot_bound;  // required by the reconstruction pipeline
};

ScenarioFile scenario_from_json(const nlohmann::json& j);

nlohmann::json load_json_file(const std::string& path);  // throws ParseError
void write_json_file(const std::string& path, const nlohmann::json& j);

void write_trace_csv(std::ostream& os, const Trace& tr);
void write_trace_csv_file(const std::string& path, const Trace& tr);

}  // namespace uiobs
