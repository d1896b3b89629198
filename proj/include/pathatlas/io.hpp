#pragma once

#include <json.hpp>

#include "pathatlas/atlas.hpp"
#include "pathatlas/lifts.hpp"
#include "pathatlas/path_space.hpp"
#include "pathatlas/regulated.hpp"

namespace pathatlas {

/// JSON value with keys kept in insertion order, so emitted documents have a fixed layout.
using Json = nlohmann::ordered_json;

/// Finite numbers as JSON numbers; infinities and NaN as the strings "inf", "-inf", "nan".
Json number(double x);
double to_number(const Json& j);

Json encode(const Vec& v);
Json encode(const Mat& m);
Json encode(const StepCurve& c);
Json encode(const RegCurve& c);
Json encode(const PathChartSystem& s);
Json encode(const PathRep& r);
Json encode(const FieldRep& f);
Json encode(const OpennessCertificate& c);

// Decoders throw std::invalid_argument on schema violations.
Vec decode_vec(const Json& j);
Mat decode_mat(const Json& j);
StepCurve decode_step(const Json& j);
RegCurve decode_curve(const Json& j);
PathChartSystem decode_system(const Json& j);
PathRep decode_rep(const Json& j);
FieldRep decode_field(const Json& j);

/// Builtin parameters from {"dim": .., "radius": .., "base": ..}; missing keys keep their defaults.
BuiltinParams decode_params(const Json& j);

}  // namespace pathatlas
