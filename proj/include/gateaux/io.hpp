#ifndef GATEAUX_IO_HPP
#define GATEAUX_IO_HPP

#include <cstdint>
#include <map>
#include <string>

#include "json.hpp"

#include "gateaux/povm.hpp"
#include "gateaux/types.hpp"

namespace gateaux {

using Json = nlohmann::json;

// Matrix files: {"rows":r, "cols":c, "re":[[..]], "im":[[..]]}; "im" may be
// omitted for real matrices.  All entries must be finite.
Json matrix_to_json(const Mat& m);
Mat matrix_from_json(const Json& j);
Mat read_matrix_file(const std::string& path);
void write_matrix_file(const std::string& path, const Mat& m);

// Complex vectors as {"re":[..], "im":[..]}.
Json vector_to_json(const Vec& v);
Vec vector_from_json(const Json& j);

// POVM files: {"labels":[..], "dim":d, "effects":{label:{"re":[[..]],"im":[[..]]}}}.
Json povm_to_json(const FinitePovm& nu);
FinitePovm povm_from_json(const Json& j);
FinitePovm read_povm_file(const std::string& path);

// Scalar functions on the label set: {"values":{label: number | {"re":x,"im":y}}}.
std::map<std::string, cplx> scalar_function_from_json(const Json& j);
std::map<std::string, cplx> read_scalar_function_file(const std::string& path);

// Parses a JSON document from disk; InvalidInput names the offending file.
Json read_json_file(const std::string& path);

// FNV-1a (64-bit) over the canonical dump; reports embed it as 16 hex digits.
std::uint64_t fnv1a64(const std::string& data);
std::string json_digest(const Json& j);

}  // namespace gateaux

#endif  // GATEAUX_IO_HPP
