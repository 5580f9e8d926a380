// Command-line front end: reads a JSON job description, runs the requested
// computation, and writes a JSON report.  Exit codes: 0 success, 2 schema
// error, 3 numerical failure, 4 domain error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "hurwitz/apps.hpp"

using nlohmann::json;
using namespace hurwitz;

namespace {

constexpr int kSchemaVersion = 1;

json complex_to_json(cd z) { return json::array({z.real(), z.imag()}); }

cd complex_from_json(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw SchemaError(std::string(what) + " must be a two-element [re, im] array");
    return cd(j[0].get<double>(), j[1].get<double>());
}

json matrix_to_json(const Mat& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

json vector_to_json(const Vec& v) {
    json out = json::array();
    for (int i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
    return out;
}

std::vector<cd> complex_list_from_json(const json& j, const char* what) {
    if (!j.is_array()) throw SchemaError(std::string(what) + " must be an array");
    std::vector<cd> out;
    for (const auto& e : j) out.push_back(complex_from_json(e, what));
    return out;
}

struct Job {
    json doc;
    std::vector<cd> branch_points;
    PeriodOptions period_options;
    double fd_step_rel = 1e-4;
    double residual_tolerance = 1e-4;

    const json& require(const char* key) const {
        if (!doc.contains(key)) throw SchemaError(std::string("missing field: ") + key);
        return doc.at(key);
    }
};

Job parse_job(const json& doc) {
    if (!doc.is_object()) throw SchemaError("input document must be a JSON object");
    if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer())
        throw SchemaError("missing integer schema_version");
    if (doc["schema_version"].get<int>() != kSchemaVersion)
        throw SchemaError("unsupported schema_version");
    Job job;
    job.doc = doc;
    job.branch_points = complex_list_from_json(job.require("branch_points"), "branch_points");
    if (doc.contains("parameters")) {
        const json& p = doc["parameters"];
        if (!p.is_object()) throw SchemaError("parameters must be an object");
        if (p.contains("quad_order")) job.period_options.quad_order = p["quad_order"].get<int>();
        if (p.contains("loop_nodes")) job.period_options.loop_nodes = p["loop_nodes"].get<int>();
        if (p.contains("fd_step")) job.fd_step_rel = p["fd_step"].get<double>();
        if (p.contains("residual_tolerance"))
            job.residual_tolerance = p["residual_tolerance"].get<double>();
    }
    return job;
}

json echo_parameters(const Job& job) {
    return json{{"quad_order", job.period_options.quad_order},
                {"loop_nodes", job.period_options.loop_nodes},
                {"fd_step", job.fd_step_rel},
                {"residual_tolerance", job.residual_tolerance}};
}

json base_report(const Job& job, const std::string& command) {
    json rep;
    rep["schema_version"] = kSchemaVersion;
    rep["command"] = command;
    json pts = json::array();
    for (cd p : job.branch_points) pts.push_back(complex_to_json(p));
    rep["branch_points"] = pts;
    rep["parameters"] = echo_parameters(job);
    return rep;
}

PrimaryDifferential parse_phi(const Job& job) {
    PrimaryDifferential phi;
    if (job.doc.contains("phi")) {
        const json& p = job.doc["phi"];
        if (!p.is_object() || !p.contains("numerator"))
            throw SchemaError("phi must be an object with a numerator array");
        phi.numerator = complex_list_from_json(p["numerator"], "phi.numerator");
        if (phi.numerator.empty()) throw SchemaError("phi.numerator must be nonempty");
    }
    return phi;
}

QuasiPermData parse_quasi_perm(const Job& job, const Curve& curve) {
    const json& q = job.require("quasi_permutation");
    if (!q.is_object()) throw SchemaError("quasi_permutation must be an object");
    QuasiPermData qp;
    const json& r = q.contains("r") ? q["r"] : json();
    if (!r.is_array() || r.empty()) throw SchemaError("quasi_permutation.r must be an M x 2 array");
    qp.r = Eigen::MatrixXd::Zero(static_cast<int>(r.size()), 2);
    for (int m = 0; m < static_cast<int>(r.size()); ++m) {
        if (!r[m].is_array() || r[m].size() != 2)
            throw SchemaError("quasi_permutation.r rows must have two entries");
        qp.r(m, 0) = r[m][0].get<double>();
        qp.r(m, 1) = r[m][1].get<double>();
    }
    int g = curve.genus();
    qp.p = Vec::Zero(g);
    qp.q = Vec::Zero(g);
    if (q.contains("p")) {
        auto pv = complex_list_from_json(q["p"], "quasi_permutation.p");
        if (static_cast<int>(pv.size()) != g)
            throw SchemaError("quasi_permutation.p must have genus entries");
        for (int a = 0; a < g; ++a) qp.p(a) = pv[a];
    }
    if (q.contains("q")) {
        auto qv = complex_list_from_json(q["q"], "quasi_permutation.q");
        if (static_cast<int>(qv.size()) != g)
            throw SchemaError("quasi_permutation.q must have genus entries");
        for (int a = 0; a < g; ++a) qp.q(a) = qv[a];
    }
    if (!q.contains("lambda0")) throw SchemaError("quasi_permutation.lambda0 is required");
    qp.lambda0 = complex_from_json(q["lambda0"], "quasi_permutation.lambda0");
    if (q.contains("sheet0")) qp.sheet0 = q["sheet0"].get<int>();
    if (qp.sheet0 != 1 && qp.sheet0 != -1)
        throw SchemaError("quasi_permutation.sheet0 must be +1 or -1");
    return qp;
}

json tau_result_to_json(const TauResult& t) {
    json out;
    out["log_abs"] = t.log_abs;
    out["phase"] = t.phase;
    return out;
}

// Theta-route evaluation points, offset from the first branch point.
SurfacePoint theta_p0(const Curve& curve) {
    return SurfacePoint::generic(curve.config.points[0] + cd(0.31, 0.83) * curve.scale(), +1);
}
SurfacePoint theta_q0(const Curve& curve) {
    return SurfacePoint::generic(curve.config.points[0] + cd(0.67, -0.52) * curve.scale(), -1);
}

int run_periods(const Job& job, json& rep) {
    Curve curve = build_curve(job.branch_points);
    PeriodData pd = compute_periods(curve, job.period_options);
    rep["genus"] = curve.genus();
    rep["a_periods"] = matrix_to_json(pd.A);
    rep["period_matrix"] = matrix_to_json(pd.B);
    rep["normalization_coefficients"] = matrix_to_json(pd.Vcoef);
    rep["diagnostics"] = json{{"symmetry_defect", pd.sym_defect},
                              {"quadrature_defect", pd.quad_defect}};
    return 0;
}

int run_tau(const Job& job, json& rep) {
    Curve curve = build_curve(job.branch_points);
    PeriodData pd = compute_periods(curve, job.period_options);
    TauResult hyp = tau_hyperelliptic(curve, pd);
    TauResult theta = tau_theta(curve, pd, theta_p0(curve), theta_q0(curve));
    json routes;
    routes["hyperelliptic"] = tau_result_to_json(hyp);
    routes["theta"] = tau_result_to_json(theta);
    routes["theta"]["cross_check_defect"] = theta.defect;
    json ratios;
    ratios["theta_vs_hyperelliptic"] = theta.log_abs - hyp.log_abs;
    if (curve.genus() == 1) {
        TauResult eta = tau_genus1(curve, pd);
        routes["eta"] = tau_result_to_json(eta);
        ratios["eta_vs_hyperelliptic"] = eta.log_abs - hyp.log_abs;
    }
    rep["routes"] = routes;
    rep["log_modulus_differences"] = ratios;
    return 0;
}

int run_tau_check(const Job& job, json& rep) {
    Curve curve = build_curve(job.branch_points);
    double h = job.fd_step_rel * curve.scale();
    SurfacePoint P = theta_p0(curve), Q = theta_q0(curve);
    json table = json::array();
    double worst = 0.0;
    for (int m = 0; m < curve.config.count(); ++m) {
        double d = validate_deftau(curve, m, h, TauRoute::Hyperelliptic, job.period_options);
        RauchReport r = rauch_validators(curve, m, h, P, Q, job.period_options);
        json row;
        row["point_index"] = m;
        row["defining_equation"] = d;
        row["b_periods"] = r.bperiods;
        row["normalized_differential"] = r.differential;
        row["bergman_kernel"] = r.bergman;
        row["prime_form"] = r.primeform;
        table.push_back(row);
        worst = std::max({worst, d, r.bperiods, r.differential, r.bergman, r.primeform});
    }
    rep["residuals"] = table;
    rep["max_residual"] = worst;
    rep["tolerance"] = job.residual_tolerance;
    rep["pass"] = worst < job.residual_tolerance;
    return worst < job.residual_tolerance ? 0 : 3;
}

int run_g_function(const Job& job, json& rep) {
    Curve curve = build_curve(job.branch_points);
    PeriodData pd = compute_periods(curve, job.period_options);
    PrimaryDifferential phi = parse_phi(job);
    cd g = g_function(curve, pd, phi);
    rep["g_function"] = complex_to_json(g);
    rep["additive_constant"] = "undetermined";
    json res = json::array();
    for (int m = 0; m < curve.config.count(); ++m)
        res.push_back(complex_to_json(residue_phi2(curve, phi, m)));
    rep["phi_squared_residues"] = res;
    return 0;
}

int run_f1(const Job& job, json& rep) {
    Curve curve = build_curve(job.branch_points);
    PeriodData pd = compute_periods(curve, job.period_options);
    const json& yj = job.require("y");
    if (!yj.is_object()) throw SchemaError("y must be an object");
    YFunction y;
    if (yj.contains("r")) y.r = complex_list_from_json(yj["r"], "y.r");
    if (yj.contains("s")) y.s = complex_list_from_json(yj["s"], "y.s");
    if (y.r.empty() || y.s.empty()) throw SchemaError("y.r and y.s must be nonempty");
    cd v_top(1.0, 0.0);
    int d2 = 2;
    if (yj.contains("v_top")) v_top = complex_from_json(yj["v_top"], "y.v_top");
    if (yj.contains("d2")) d2 = yj["d2"].get<int>();
    if (d2 < 2) throw SchemaError("y.d2 must be at least 2");
    cd f1 = f1_one_matrix(curve, pd, y, v_top, d2);
    rep["f1"] = complex_to_json(f1);
    rep["additive_constant"] = "undetermined";
    json res = json::array();
    for (int m = 0; m < curve.config.count(); ++m)
        res.push_back(complex_to_json(residue_dy2(curve, y, m)));
    rep["dy_squared_residues"] = res;
    return 0;
}

int run_jm_tau(const Job& job, json& rep) {
    Curve curve = build_curve(job.branch_points);
    PeriodData pd = compute_periods(curve, job.period_options);
    QuasiPermData qp = parse_quasi_perm(job, curve);
    TauResult t = jm_tau(curve, pd, qp);
    rep["jimbo_miwa_tau"] = tau_result_to_json(t);
    rep["omega"] = vector_to_json(omega_vector(curve, pd, qp));
    return 0;
}

int run_psi(const Job& job, json& rep) {
    Curve curve = build_curve(job.branch_points);
    PeriodData pd = compute_periods(curve, job.period_options);
    QuasiPermData qp = parse_quasi_perm(job, curve);
    cd lambda = complex_from_json(job.require("lambda"), "lambda");
    std::vector<OddSpinData> spins = all_odd_spins(curve, pd);
    Eigen::Matrix2cd psi = psi_matrix(curve, pd, qp, lambda, spins);
    json rows = json::array();
    for (int i = 0; i < 2; ++i) {
        json row = json::array();
        for (int j = 0; j < 2; ++j) row.push_back(complex_to_json(psi(i, j)));
        rows.push_back(row);
    }
    rep["psi"] = rows;
    rep["lambda"] = complex_to_json(lambda);
    return 0;
}

int run_validate(const Job& job, json& rep) {
    Curve curve = build_curve(job.branch_points);
    PeriodData pd = compute_periods(curve, job.period_options);
    const int g = curve.genus();
    json checks;
    double worst = 0.0;
    auto record = [&](const char* name, double value, double tol) {
        checks[name] = json{{"residual", value}, {"tolerance", tol}};
        worst = std::max(worst, value / tol);
    };

    record("period_matrix_symmetry", pd.sym_defect, 1e-8);
    record("a_period_quadrature", pd.quad_defect, 1e-9);

    double closure = 0.0;
    for (int b = 0; b < g; ++b) closure = std::max(closure, a_loop(curve, pd, b).closure_defect);
    record("a_loop_closure", closure, 1e-7);

    Vec zgen(g);
    for (int a = 0; a < g; ++a)
        zgen(a) = cd(0.23 + 0.05 * a, 0.0) + cd(0.17, 0.0) * pd.B(a, a);
    record("theta_quasi_periodicity", theta_quasiperiod_defect(pd.B, zgen), 1e-9);

    DivisorClass dc = divisor_class_vectors(curve, pd);
    record("divisor_class_integrality", dc.defect, 1e-6);
    checks["divisor_class_normalized"] = json{{"pass", dc.normalized}};

    std::vector<OddSpinData> spins = all_odd_spins(curve, pd);
    SurfacePoint P = theta_p0(curve), Q = theta_q0(curve);
    cd wpq = bergman_W(curve, pd, spins, P, Q), wqp = bergman_W(curve, pd, spins, Q, P);
    record("bergman_symmetry", std::abs(wpq - wqp) / std::abs(wpq), 1e-9);

    cd e0 = prime_form(curve, pd, spins[0], P, Q);
    double emax = 0.0;
    for (const auto& sp : spins) {
        cd e = prime_form(curve, pd, sp, P, Q);
        emax = std::max(emax, std::abs(e - e0) / std::abs(e0));
    }
    record("prime_form_characteristic_independence", emax, 1e-8);

    TauResult theta_route = tau_theta(curve, pd, P, Q);
    record("tau_route_cross_check", theta_route.defect, 1e-5);
    if (g == 1) {
        TauResult eta = tau_genus1(curve, pd);
        TauResult hyp = tau_hyperelliptic(curve, pd);
        checks["eta_route_log_modulus_difference"] =
            json{{"value", eta.log_abs - hyp.log_abs}};
    }

    double h = job.fd_step_rel * curve.scale();
    record("defining_equation_first_point", validate_deftau(curve, 0, h), 1e-4);

    rep["checks"] = checks;
    rep["pass"] = worst < 1.0;
    return worst < 1.0 ? 0 : 3;
}

int dispatch(const std::string& command, const Job& job, json& rep) {
    if (command == "periods") return run_periods(job, rep);
    if (command == "tau") return run_tau(job, rep);
    if (command == "tau-check") return run_tau_check(job, rep);
    if (command == "g-function") return run_g_function(job, rep);
    if (command == "f1") return run_f1(job, rep);
    if (command == "jm-tau") return run_jm_tau(job, rep);
    if (command == "psi") return run_psi(job, rep);
    if (command == "validate") return run_validate(job, rep);
    throw SchemaError("unknown subcommand: " + command);
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Schema: return 2;
        case ErrorKind::Numerical: return 3;
        case ErrorKind::Domain: return 4;
    }
    return 3;
}

void emit(const json& doc, const std::string& output) {
    std::string text = doc.dump(2);
    text.push_back('\n');
    if (output.empty() || output == "-") {
        std::cout << text;
    } else {
        std::ofstream out(output, std::ios::binary);
        if (!out) throw SchemaError("cannot open output file: " + output);
        out << text;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tau-functions of hyperelliptic Hurwitz Frobenius manifolds"};
    app.require_subcommand(1);

    std::string input, output;
    std::vector<std::string> names = {"periods",    "tau", "tau-check", "g-function",
                                      "f1",         "jm-tau", "psi",    "validate"};
    for (const auto& n : names) {
        CLI::App* sub = app.add_subcommand(n);
        sub->add_option("--input", input, "job document (JSON file, or - for stdin)")->required();
        sub->add_option("--output", output, "report destination (default: stdout)");
    }
    CLI11_PARSE(app, argc, argv);
    std::string command = app.get_subcommands().front()->get_name();

    json error_doc;
    error_doc["schema_version"] = kSchemaVersion;
    try {
        std::string text;
        if (input == "-") {
            std::ostringstream ss;
            ss << std::cin.rdbuf();
            text = ss.str();
        } else {
            std::ifstream in(input, std::ios::binary);
            if (!in) throw SchemaError("cannot open input file: " + input);
            std::ostringstream ss;
            ss << in.rdbuf();
            text = ss.str();
        }
        json doc;
        try {
            doc = json::parse(text);
        } catch (const json::exception& e) {
            throw SchemaError(std::string("invalid JSON: ") + e.what());
        }
        Job job = parse_job(doc);
        json rep = base_report(job, command);
        int code = dispatch(command, job, rep);
        emit(rep, output);
        return code;
    } catch (const Error& e) {
        error_doc["error"] = json{{"code", e.code()},
                                  {"kind", exit_code_for(e.kind())},
                                  {"message", e.what()}};
        emit(error_doc, output);
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        error_doc["error"] = json{{"code", "Internal"}, {"kind", 3}, {"message", e.what()}};
        emit(error_doc, output);
        return 3;
    }
}
