#pragma once

// JSON / CSV serialization of reports and nodal fields. All file formats
// carry "schema_version": 1. CSV doubles are printed with %.17g so that
// reruns with identical inputs are byte-identical.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hess2/margin.hpp"
#include "hess2/probe.hpp"
#include "hess2/sampling.hpp"
#include "hess2/solver.hpp"

namespace hess2 {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// --- margin / sampling ---

inline json to_json(const MarginPart& p) {
    return json{{"label", p.label}, {"lhs", p.lhs},     {"rhs", p.rhs},
                {"margin", p.margin}, {"scale", p.scale}};
}

inline json to_json(const MarginReport& r) {
    json hyp = json::object();
    for (const auto& h : r.hypotheses) hyp[h.label] = h.ok;
    json parts = json::array();
    for (const auto& p : r.parts) parts.push_back(to_json(p));
    json wit = json::object();
    for (const auto& [k, v] : r.witness) wit[k] = v;
    json j{{"schema_version", kSchemaVersion},
           {"name", r.name},
           {"hypotheses", hyp},
           {"vacuous", r.vacuous()},
           {"sorted_applied", r.sorted_applied},
           {"parts", parts},
           {"witness", wit}};
    if (!r.parts.empty()) {
        const auto& w = r.worst();
        j["lhs"] = w.lhs;
        j["rhs"] = w.rhs;
        j["margin"] = w.margin;
    }
    return j;
}

inline json to_json(const SampleReport& r) {
    return json{{"schema_version", kSchemaVersion},
                {"name", r.which},
                {"seed", r.seed},
                {"count", r.count},
                {"tol", r.tol},
                {"evaluated", r.evaluated},
                {"vacuous", r.vacuous},
                {"rejected", r.rejected},
                {"attempts", r.attempts},
                {"violations", r.violations},
                {"min_margin", r.min_margin},
                {"min_rel_margin", r.min_rel_margin},
                {"witness", to_json(r.argmin)}};
}

inline json to_json(const FrontierTable& t) {
    json rows = json::array();
    for (const auto& r : t.rows)
        rows.push_back(json{{"eps", r.eps},
                            {"min_margin", r.min_margin},
                            {"min_rel_margin", r.min_rel_margin},
                            {"violations", r.violations},
                            {"argmin_lambda", r.argmin_lambda}});
    return json{{"schema_version", kSchemaVersion},
                {"seed", t.seed},
                {"count", t.count},
                {"largest_nonneg_eps", t.largest_nonneg_eps},
                {"rows", rows}};
}

inline std::string frontier_csv(const FrontierTable& t) {
    std::string out = "eps,min_margin,min_rel_margin,violations\n";
    for (const auto& r : t.rows)
        out += fmt_double(r.eps) + "," + fmt_double(r.min_margin) + "," +
               fmt_double(r.min_rel_margin) + "," + std::to_string(r.violations) + "\n";
    return out;
}

// --- fields & solves ---

inline void write_field(const std::string& base_path, const ScalarField& f) {
    const auto& dom = f.domain();
    json hdr{{"schema_version", kSchemaVersion},
             {"kind", "field"},
             {"n", dom.dim()},
             {"m", dom.nodes_per_axis()},
             {"lo", dom.lo()},
             {"hi", dom.hi()},
             {"ordering", "row-major, axis 0 slowest"},
             {"values_file", base_path.substr(base_path.find_last_of('/') + 1) + ".csv"}};
    write_text_file(base_path + ".json", hdr.dump(2) + "\n");
    std::string csv;
    csv.reserve(f.values().size() * 20);
    for (double v : f.values()) {
        csv += fmt_double(v);
        csv += '\n';
    }
    write_text_file(base_path + ".csv", csv);
}

inline ScalarField read_field(const std::string& base_path) {
    const json hdr = json::parse(read_text_file(base_path + ".json"));
    if (hdr.at("kind") != "field") throw std::runtime_error("not a field artifact: " + base_path);
    GridDomain dom(hdr.at("n").get<int>(), hdr.at("lo").get<double>(), hdr.at("hi").get<double>(),
                   hdr.at("m").get<int>());
    ScalarField f(dom);
    std::istringstream in(read_text_file(base_path + ".csv"));
    for (auto& v : f.values()) {
        std::string line;
        if (!std::getline(in, line)) throw std::runtime_error("field csv truncated: " + base_path);
        v = std::stod(line);
    }
    return f;
}

inline json to_json(const SolveReport& r, bool with_history = true) {
    json j{{"schema_version", kSchemaVersion},
           {"kind", "solve_report"},
           {"converged", true},
           {"iterations", r.iterations},
           {"gamma2_certified", r.gamma2_certified},
           {"min_linearization_eigenvalue", r.min_linearization_eigenvalue},
           {"final_residual", r.residual_history.empty() ? 0.0 : r.residual_history.back()}};
    if (with_history) j["residual_history"] = r.residual_history;
    return j;
}

// --- probe reports ---

inline json to_json(const PogorelovReport& r) {
    return json{{"schema_version", kSchemaVersion},
                {"kind", "pogorelov"},
                {"alpha", r.alpha},
                {"variant", r.variant == PogorelovVariant::laplacian ? "laplacian"
                                                                     : "largest-eigenvalue"},
                {"value", r.value},
                {"max_eigen_value", r.max_eigen_value},
                {"argmax", {r.argmax[0], r.argmax[1], r.argmax[2]}},
                {"argmax_depth", r.argmax_depth},
                {"attained_strictly_interior", r.attained_strictly_interior}};
}

inline json to_json(const RescaleReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back(json{{"R", row.r},
                            {"sup_hess", row.sup_hess},
                            {"osc", row.osc},
                            {"pog_quantity", row.pog_quantity},
                            {"nodes_in_mask", row.nodes_in_mask},
                            {"hessian_identity_dev", row.hessian_identity_dev}});
    return json{{"schema_version", kSchemaVersion},
                {"kind", "rescale"},
                {"base", r.base_name},
                {"A", r.a_param},
                {"box_halfwidth", r.box_halfwidth},
                {"m", r.m},
                {"alpha", r.alpha},
                {"rows", rows}};
}

inline std::string rescale_csv(const RescaleReport& r) {
    std::string out = "R,sup_hess,osc,pog_quantity,nodes_in_mask\n";
    for (const auto& row : r.rows)
        out += fmt_double(row.r) + "," + fmt_double(row.sup_hess) + "," + fmt_double(row.osc) +
               "," + fmt_double(row.pog_quantity) + "," + std::to_string(row.nodes_in_mask) + "\n";
    return out;
}

inline json to_json(const WarrenReport& r) {
    return json{{"schema_version", kSchemaVersion},
                {"kind", "warren"},
                {"samples", r.samples},
                {"max_equation_dev", r.max_equation_dev},
                {"equation_violations", r.equation_violations},
                {"gamma2_failures", r.gamma2_failures},
                {"fd_crosscheck_dev", r.fd_crosscheck_dev},
                {"fits_tested", r.fits_tested},
                {"fits_violated", r.fits_violated},
                {"growth_witness", {{"t", r.witness_t}, {"u", r.witness_u}, {"bound", r.witness_bound}}}};
}

inline json to_json(const PhaseReport& r) {
    return json{{"schema_version", kSchemaVersion},
                {"kind", "phase"},
                {"samples", r.samples},
                {"max_phase_dev", r.max_phase_dev},
                {"phase_violations", r.phase_violations},
                {"max_re_identity_dev", r.max_re_identity_dev},
                {"max_im_identity_dev", r.max_im_identity_dev},
                {"im_sign_failures", r.im_sign_failures},
                {"control_phase_dev", r.control_phase_dev}};
}

inline json to_json(const DiffEqReport& r) {
    return json{{"schema_version", kSchemaVersion},
                {"kind", "diffeq"},
                {"max_by_k", r.max_by_k},
                {"max_overall", r.max_overall},
                {"nodes", r.nodes}};
}

}  // namespace hess2
