#include "otg/report.hpp"

namespace otg {

Json to_json(const Vec& v) {
    Json a = Json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Json to_json(const Mat& m) {
    Json j;
    j["shape"] = {m.rows(), m.cols()};
    Json a = Json::array();
    for (int i = 0; i < m.rows(); ++i)
        for (int k = 0; k < m.cols(); ++k) a.push_back(m(i, k));
    j["data"] = std::move(a);
    return j;
}

Json to_json(const Tensor3& t) {
    const int n = t.dim();
    Json j;
    j["shape"] = {n, n, n};
    Json a = Json::array();
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) a.push_back(t.at(i, k, l));
    j["data"] = std::move(a);
    return j;
}

Json to_json(const Tensor4& t) {
    const int n = t.dim();
    Json j;
    j["shape"] = {n, n, n, n};
    Json a = Json::array();
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l)
                for (int m = 0; m < n; ++m) a.push_back(t.at(i, k, l, m));
    j["data"] = std::move(a);
    return j;
}

Json to_json(const Certificate& cert) {
    Json j;
    j["mode"] = cert_mode_name(cert.mode);
    j["target"] = cert.target;
    Json region = Json::array();
    for (const auto& [lo, hi] : cert.region.lohi) region.push_back({lo, hi});
    j["region"] = std::move(region);
    j["samples"] = cert.samples;
    j["refinements"] = cert.refinements;
    j["empirical_min"] = cert.empirical_min;
    j["kappa_estimate"] = cert.kappa_estimate;
    j["witness"] = {{"point", cert.witness.z}, {"xi", cert.witness.xi}, {"eta", cert.witness.eta},
                    {"value", cert.witness.value}};
    j["verdict"] = cert.holds ? "holds-empirically" : "violated";
    j["seed"] = cert.seed;
    return j;
}

Json to_json(const TransportPlan& plan, bool dense) {
    Json j;
    j["rows"] = plan.rows;
    j["cols"] = plan.cols;
    j["cost"] = plan.cost;
    j["method"] = plan.method;
    if (plan.iterations > 0) j["iterations"] = plan.iterations;
    if (dense) {
        j["coupling"] = to_json(plan.coupling);
    } else {
        Json triplets = Json::array();
        for (int i = 0; i < plan.rows; ++i)
            for (int k = 0; k < plan.cols; ++k)
                if (plan.coupling(i, k) > 1e-15) triplets.push_back({i, k, plan.coupling(i, k)});
        j["triplets"] = std::move(triplets);
    }
    return j;
}

Json to_json(const TransportMap& map) {
    Json j;
    j["assignment"] = map.assignment;
    j["deterministic"] = map.deterministic;
    j["leakage"] = map.leakage;
    return j;
}

Json to_json(const PotentialPair& pp) {
    Json j;
    j["u"] = pp.u;
    j["v"] = pp.v;
    return j;
}

Json to_json(const InDomainResult& r) {
    Json j;
    j["ok"] = r.ok;
    if (!r.reason.empty()) j["reason"] = r.reason;
    j["predicate_slack"] = r.predicate_slack;
    j["min_eigenvalue"] = r.min_eigenvalue;
    return j;
}

Report::Report(std::string command, std::uint64_t seed) {
    j_["version"] = "1";
    j_["command"] = std::move(command);
    j_["inputs"] = Json::object();
    j_["outputs"] = Json::object();
    j_["provenance"] = {{"seed", seed}, {"tolerances", Json::object()}};
}

void Report::tolerance(const std::string& name, double value) { j_["provenance"]["tolerances"][name] = value; }

void Report::finish(bool with_timing, double elapsed_ms) {
    if (with_timing) j_["timing_ms"] = elapsed_ms;
}

}  // namespace otg
