#include "uiobs/json_io.hpp"

#include <fstream>
#include <iomanip>

#include "uiobs/errors.hpp"

namespace uiobs {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& M) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
        rows.push_back(row);
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& name) {
    if (!j.is_array() || j.empty() || !j[0].is_array())
        throw ParseError(name + ": expected a non-empty array of rows");
    const size_t rows = j.size(), cols = j[0].size();
    Eigen::MatrixXd M(rows, cols);
    for (size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols)
            throw ParseError(name + ": ragged rows");
        for (size_t c = 0; c < cols; ++c) {
            if (!j[r][c].is_number()) throw ParseError(name + ": non-numeric entry");
            M(r, c) = j[r][c].get<double>();
        }
    }
    return M;
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& name) {
    if (!j.is_array()) throw ParseError(name + ": expected an array");
    Eigen::VectorXd v(j.size());
    for (size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw ParseError(name + ": non-numeric entry");
        v(i) = j[i].get<double>();
    }
    return v;
}

LtiSystem system_from_json(const json& j) {
    for (const char* key : {"A", "C"})
        if (!j.contains(key)) throw ParseError(std::string("system: missing key ") + key);
    LtiSystem sys;
    sys.A = matrix_from_json(j.at("A"), "A");
    const int n = sys.n();
    sys.B = j.contains("B") ? matrix_from_json(j.at("B"), "B")
                            : Eigen::MatrixXd::Zero(n, 0);
    sys.D = j.contains("D") ? matrix_from_json(j.at("D"), "D")
                            : Eigen::MatrixXd::Zero(n, 0);
    sys.C = matrix_from_json(j.at("C"), "C");
    if (j.contains("F")) sys.F = matrix_from_json(j.at("F"), "F");
    sys.bounds = j.contains("bounds") ? vector_from_json(j.at("bounds"), "bounds")
                                      : Eigen::VectorXd::Ones(sys.m());
    sys.validate();
    return sys;
}

json system_to_json(const LtiSystem& sys) {
    json j;
    j["A"] = matrix_to_json(sys.A);
    j["B"] = matrix_to_json(sys.B);
    j["D"] = matrix_to_json(sys.D);
    j["C"] = matrix_to_json(sys.C);
    if (sys.F) j["F"] = matrix_to_json(*sys.F);
    j["bounds"] = std::vector<double>(sys.bounds.data(), sys.bounds.data() + sys.bounds.size());
    return j;
}

json normalform_to_json(const NormalFormResult& nf) {
    json j;
    j["mu"] = nf.mu;
    j["T"] = matrix_to_json(nf.T);
    j["Gamma"] = matrix_to_json(nf.Gamma);
    j["Xi"] = matrix_to_json(nf.Xi);
    j["Abar"] = matrix_to_json(nf.Abar);
    j["Bbar"] = matrix_to_json(nf.Bbar);
    j["Dbar"] = matrix_to_json(nf.Dbar);
    j["Cbar"] = matrix_to_json(nf.Cbar);
    j["alpha"] = matrix_to_json(nf.alpha);
    json betas = json::array();
    for (const auto& e : nf.beta.entries())
        betas.push_back({{"j", e.j}, {"k", e.k}, {"l", e.l}, {"value", e.value}});
    j["beta"] = betas;
    return j;
}

namespace {

SignalSpec signal_from_json(const json& j, const std::string& name) {
    SignalSpec s;
    if (j.is_number()) {  // plain constant
        s.offset = j.get<double>();
        return s;
    }
    if (!j.is_object()) throw ParseError(name + ": expected object or number");
    s.offset = j.value("offset", 0.0);
    if (j.contains("sinusoids")) {
        for (const auto& sj : j.at("sinusoids")) {
            Sinusoid sin_spec;
            sin_spec.amplitude = sj.value("amplitude", 0.0);
            sin_spec.omega = sj.value("omega", 0.0);
            sin_spec.phase = sj.value("phase", 0.0);
            s.sinusoids.push_back(sin_spec);
        }
    }
    return s;
}

}  // namespace

ScenarioFile scenario_from_json(const json& j) {
    if (!j.contains("system")) throw ParseError("scenario: missing key system");
    ScenarioFile sc;
    sc.system = system_from_json(j.at("system"));
    sc.x0 = j.contains("x0") ? vector_from_json(j.at("x0"), "x0")
                             : Eigen::VectorXd::Zero(sc.system.n());
    if (j.contains("xhat0")) sc.xhat0 = vector_from_json(j.at("xhat0"), "xhat0");
    if (j.contains("disturbance")) {
        int i = 0;
        for (const auto& dj : j.at("disturbance"))
            sc.disturbance.push_back(signal_from_json(dj, "disturbance[" + std::to_string(i++) + "]"));
    }
    if (j.contains("control")) {
        const auto& cj = j.at("control");
        if (cj.contains("open_loop")) {
            int i = 0;
            for (const auto& uj : cj.at("open_loop"))
                sc.open_loop.push_back(signal_from_json(uj, "open_loop[" + std::to_string(i++) + "]"));
        }
        if (cj.contains("feedback")) {
            FeedbackSpec fb;
            fb.K = matrix_from_json(cj.at("feedback").at("K"), "K");
            fb.h = vector_from_json(cj.at("feedback").at("h"), "h");
            sc.feedback = fb;
        }
    }
    sc.step = j.value("step", 1e-4);
    sc.horizon = j.value("horizon", 10.0);
    if (j.contains("gains"))
        sc.gains = j.at("gains").get<std::vector<std::vector<double>>>();
    if (j.contains("injection")) {
        const std::string kind = j.at("injection").get<std::string>();
        if (kind == "discontinuous") sc.injection = InjectionKind::Discontinuous;
        else if (kind == "continuous") sc.injection = InjectionKind::ContinuousHomogeneous;
        else throw ParseError("scenario: injection must be discontinuous or continuous");
    }
    sc.q = j.value("q", -0.5);
    if (j.contains("ddot_bound")) sc.ddot_bound = j.at("ddot_bound").get<double>();
    return sc;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
}

void write_trace_csv(std::ostream& os, const Trace& tr) {
    const int n = tr.x.empty() ? 0 : static_cast<int>(tr.x[0].size());
    os << "t";
    for (int i = 1; i <= n; ++i) os << ",x" << i;
    for (int i = 1; i <= n; ++i) os << ",xhat" << i;
    for (int i = 1; i <= n; ++i) os << ",eta" << i;
    if (!tr.delta_hat.empty()) os << ",delta_hat";
    os << '\n';
    os << std::setprecision(17);
    for (int k = 0; k < tr.samples(); ++k) {
        os << tr.times[k];
        for (int i = 0; i < n; ++i) os << ',' << tr.x[k](i);
        for (int i = 0; i < n; ++i) os << ',' << tr.xhat_original[k](i);
        for (int i = 0; i < n; ++i) os << ',' << tr.eta[k](i);
        if (!tr.delta_hat.empty()) os << ',' << tr.delta_hat[k];
        os << '\n';
    }
}

void write_trace_csv_file(const std::string& path, const Trace& tr) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    write_trace_csv(out, tr);
}

}  // namespace uiobs
