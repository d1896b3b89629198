#include <cmath>
#include <limits>
#include <stdexcept>

#include "pathatlas/io.hpp"

namespace pathatlas {
namespace {

const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw std::invalid_argument(std::string("missing field \"") + key + "\"");
    return j.at(key);
}

const Json& array(const Json& j, const char* what) {
    if (!j.is_array()) throw std::invalid_argument(std::string(what) + " must be an array");
    return j;
}

std::vector<Vec> decode_vecs(const Json& j) {
    std::vector<Vec> out;
    for (const auto& v : array(j, "vector list")) out.push_back(decode_vec(v));
    return out;
}

std::vector<StepCurve> decode_steps(const Json& j) {
    std::vector<StepCurve> out;
    for (const auto& c : array(j, "step curve list")) out.push_back(decode_step(c));
    return out;
}

}  // namespace

Json number(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

double to_number(const Json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    throw std::invalid_argument("expected a number");
}

Json encode(const Vec& v) {
    Json out = Json::array();
    for (int k = 0; k < v.size(); ++k) out.push_back(number(v(k)));
    return out;
}

Json encode(const Mat& m) {
    Json out = Json::array();
    for (int r = 0; r < m.rows(); ++r) out.push_back(encode(Vec(m.row(r).transpose())));
    return out;
}

Json encode(const StepCurve& c) {
    Json out;
    out["breaks"] = Json::array();
    for (double b : c.breaks()) out["breaks"].push_back(number(b));
    out["values"] = Json::array();
    for (const auto& v : c.values()) out["values"].push_back(encode(v));
    return out;
}

Json encode(const RegCurve& c) {
    Json out;
    out["jet"] = Json::array();
    for (const auto& v : c.jet()) out["jet"].push_back(encode(v));
    if (c.top_start()) out["top_start"] = encode(*c.top_start());
    out["step"] = encode(c.step_derivative());
    return out;
}

Json encode(const PathChartSystem& s) {
    Json out;
    out["tau"] = Json::array();
    for (double t : s.tau) out["tau"].push_back(number(t));
    out["charts"] = s.charts;
    return out;
}

Json encode(const PathRep& r) {
    Json out;
    out["x"] = encode(r.x);
    out["pieces"] = Json::array();
    for (const auto& y : r.pieces) out["pieces"].push_back(encode(y));
    if (r.has_fibers()) {
        out["fibers"] = Json::array();
        for (const auto& u : r.fibers) out["fibers"].push_back(encode(u));
    }
    return out;
}

Json encode(const FieldRep& f) {
    Json out;
    out["phi"] = encode(f.phi);
    if (f.theta) out["theta"] = encode(*f.theta);
    return out;
}

Json encode(const OpennessCertificate& c) {
    auto list = [](const std::vector<double>& xs) {
        Json out = Json::array();
        for (double x : xs) out.push_back(number(x));
        return out;
    };
    Json out;
    out["eta"] = number(c.eta);
    out["chart_margins"] = list(c.chart_margins);
    out["junction_radii"] = list(c.junction_radii);
    out["junction_lipschitz"] = list(c.junction_lipschitz);
    out["growth"] = list(c.growth);
    return out;
}

Vec decode_vec(const Json& j) {
    array(j, "vector");
    Vec v(static_cast<int>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<int>(k)) = to_number(j[k]);
    return v;
}

Mat decode_mat(const Json& j) {
    const auto rows = decode_vecs(j);
    if (rows.empty()) throw std::invalid_argument("matrix needs at least one row");
    Mat m(static_cast<int>(rows.size()), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != m.cols()) throw std::invalid_argument("matrix rows differ in length");
        m.row(static_cast<int>(r)) = rows[r].transpose();
    }
    return m;
}

StepCurve decode_step(const Json& j) {
    std::vector<double> breaks;
    for (const auto& b : array(field(j, "breaks"), "breaks")) breaks.push_back(to_number(b));
    return StepCurve(std::move(breaks), decode_vecs(field(j, "values")));
}

RegCurve decode_curve(const Json& j) {
    std::optional<Vec> top_start;
    if (j.contains("top_start")) top_start = decode_vec(j.at("top_start"));
    return RegCurve::from_parts(decode_vecs(field(j, "jet")), top_start, decode_step(field(j, "step")));
}

PathChartSystem decode_system(const Json& j) {
    PathChartSystem s;
    for (const auto& t : array(field(j, "tau"), "tau")) s.tau.push_back(to_number(t));
    for (const auto& c : array(field(j, "charts"), "charts")) s.charts.push_back(c.get<int>());
    return s;
}

PathRep decode_rep(const Json& j) {
    PathRep r;
    r.x = decode_vec(field(j, "x"));
    r.pieces = decode_steps(field(j, "pieces"));
    if (j.contains("fibers")) r.fibers = decode_steps(j.at("fibers"));
    return r;
}

FieldRep decode_field(const Json& j) {
    FieldRep f{decode_curve(field(j, "phi")), std::nullopt};
    if (j.contains("theta")) f.theta = decode_step(j.at("theta"));
    return f;
}

BuiltinParams decode_params(const Json& j) {
    BuiltinParams p;
    if (j.is_null()) return p;
    if (!j.is_object()) throw std::invalid_argument("params must be an object");
    if (j.contains("dim")) p.dim = j.at("dim").get<int>();
    if (j.contains("radius")) p.radius = to_number(j.at("radius"));
    if (j.contains("base")) p.base = j.at("base").get<std::string>();
    return p;
}

}  // namespace pathatlas
