#ifndef HKGF_JSON_IO_HPP
#define HKGF_JSON_IO_HPP

#include <json.hpp>

#include "hkgf/decay.hpp"
#include "hkgf/geometry.hpp"
#include "hkgf/types.hpp"

namespace hkgf {

using json = nlohmann::json;

/// Matrices serialize as row-major nested arrays, vectors as arrays.
json matrix_to_json(const MatrixXd& M);
json vector_to_json(const VectorXd& v);
MatrixXd matrix_from_json(const json& j, const std::string& where);
VectorXd vector_from_json(const json& j, const std::string& where);

// Field names are part of the wire contract:
// {"sigma", "m", "kappa"}, {"A", "b", "c"}, {"gamma", "n", "varkappa"}.
json to_json(const ScaledGaussianParams& p);
json to_json(const SimpleCoords& q);
json to_json(const GaussianTarget& t);
json to_json(const CotangentHK& eta);
json to_json(const EnergySplit& e);
json to_json(const DissipationSplit& d);
json to_json(const ScanReport& r);
json to_json(const DecayRates& r);
json to_json(const DecayReport& r);

ScaledGaussianParams params_from_json(const json& j);
SimpleCoords simple_from_json(const json& j);
GaussianTarget target_from_json(const json& j);
CotangentHK cotangent_from_json(const json& j);

} // namespace hkgf

#endif
