#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "thetasing/exact.hpp"
#include "thetasing/pencils.hpp"
#include "thetasing/sing_locus.hpp"
#include "thetasing/theta_core.hpp"

namespace cli {

using nlohmann::ordered_json;
using thetasing::cplx;
using thetasing::CMatrix;
using thetasing::CVector;

inline constexpr const char* kVersion = "0.1.0";

/// "1.5", "2-0.5i", "i", "-3i", or "re,im".
cplx parse_scalar(const std::string& text);
/// Comma-separated complex entries, or a JSON list of [re, im] pairs.
CVector parse_vector(const std::string& text);
CVector vector_from_json(const ordered_json& j);

ordered_json read_json_file(const std::string& path);
/// {"g": int, "re": [[...]], "im": [[...]]}
CMatrix tau_from_json(const ordered_json& j);
/// {"n": int, "A": [["p/q", ...]], "B": [[...]]}
thetasing::Pencil pencil_from_json(const ordered_json& j);
ordered_json pencil_to_json(const thetasing::Pencil& p);
/// A JSON list of complex vectors.
std::vector<CVector> vectors_from_json(const ordered_json& j);

/// Floating-point leaf printed later with 17 significant digits.
ordered_json num(double x);
ordered_json to_json(cplx z);
ordered_json to_json(const CVector& v);
ordered_json to_json(const CMatrix& m);
ordered_json to_json(const thetasing::QVec& v);
ordered_json to_json(const thetasing::QMat& m);
ordered_json to_json(const thetasing::PVec& v);
ordered_json to_json(const thetasing::Quadric& q);

/// Serializes with every num() leaf expanded as %.17g (null when not finite).
std::string dump(const ordered_json& j);
/// %.17g
std::string format_double(double x);

}  // namespace cli
