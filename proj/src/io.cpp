#include "gateaux/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace gateaux {

namespace {

Json real_table(const RMat& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

RMat table_from(const Json& j, Index rows, Index cols, const std::string& what) {
  require(j.is_array() && static_cast<Index>(j.size()) == rows,
          what + ": row count does not match declared shape");
  RMat out(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const Json& row = j[i];
    require(row.is_array() && static_cast<Index>(row.size()) == cols,
            what + ": column count does not match declared shape");
    for (Index c = 0; c < cols; ++c) {
      require(row[c].is_number(), what + ": non-numeric entry");
      double v = row[c].get<double>();
      require(std::isfinite(v), what + ": non-finite entry");
      out(i, c) = v;
    }
  }
  return out;
}

cplx scalar_from(const Json& j, const std::string& what) {
  if (j.is_number()) {
    double v = j.get<double>();
    require(std::isfinite(v), what + ": non-finite value");
    return cplx(v, 0.0);
  }
  require(j.is_object(), what + ": value must be a number or {re, im}");
  double re = 0.0, im = 0.0;
  if (j.contains("re")) {
    require(j["re"].is_number(), what + ": re must be a number");
    re = j["re"].get<double>();
  }
  if (j.contains("im")) {
    require(j["im"].is_number(), what + ": im must be a number");
    im = j["im"].get<double>();
  }
  require(std::isfinite(re) && std::isfinite(im), what + ": non-finite value");
  return cplx(re, im);
}

}  // namespace

Json matrix_to_json(const Mat& m) {
  Json out;
  out["rows"] = m.rows();
  out["cols"] = m.cols();
  out["re"] = real_table(m.real());
  out["im"] = real_table(m.imag());
  return out;
}

Mat matrix_from_json(const Json& j) {
  require(j.is_object() && j.contains("rows") && j.contains("cols") && j.contains("re"),
          "matrix: rows, cols and re are required");
  require(j["rows"].is_number_integer() && j["cols"].is_number_integer(),
          "matrix: rows and cols must be integers");
  Index rows = j["rows"].get<Index>();
  Index cols = j["cols"].get<Index>();
  require(rows > 0 && cols > 0, "matrix: dimensions must be positive");
  RMat re = table_from(j["re"], rows, cols, "matrix re");
  RMat im = j.contains("im") ? table_from(j["im"], rows, cols, "matrix im")
                             : RMat(RMat::Zero(rows, cols));
  return re.cast<cplx>() + cplx(0.0, 1.0) * im.cast<cplx>();
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw InvalidInput("parse error in " + path + ": " + e.what());
  }
  return j;
}

Mat read_matrix_file(const std::string& path) {
  try {
    return matrix_from_json(read_json_file(path));
  } catch (const InvalidInput& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

void write_matrix_file(const std::string& path, const Mat& m) {
  std::ofstream out(path);
  require(out.good(), "cannot open file for writing: " + path);
  out << matrix_to_json(m).dump(2) << "\n";
}

Json vector_to_json(const Vec& v) {
  Json out;
  Json re = Json::array(), im = Json::array();
  for (Index i = 0; i < v.size(); ++i) {
    re.push_back(v(i).real());
    im.push_back(v(i).imag());
  }
  out["re"] = re;
  out["im"] = im;
  return out;
}

Vec vector_from_json(const Json& j) {
  require(j.is_object() && j.contains("re"), "vector: re is required");
  const Json& re = j["re"];
  require(re.is_array(), "vector: re must be an array");
  Index n = static_cast<Index>(re.size());
  Vec out(n);
  for (Index i = 0; i < n; ++i) {
    require(re[i].is_number(), "vector: non-numeric entry");
    out(i) = cplx(re[i].get<double>(), 0.0);
  }
  if (j.contains("im")) {
    const Json& im = j["im"];
    require(im.is_array() && static_cast<Index>(im.size()) == n,
            "vector: im length does not match re");
    for (Index i = 0; i < n; ++i) {
      require(im[i].is_number(), "vector: non-numeric entry");
      out(i) += cplx(0.0, im[i].get<double>());
    }
  }
  require(all_finite(out), "vector: non-finite entry");
  return out;
}

Json povm_to_json(const FinitePovm& nu) {
  Json out;
  out["labels"] = nu.labels;
  out["dim"] = nu.dim;
  Json effects = Json::object();
  for (size_t i = 0; i < nu.labels.size(); ++i) {
    Json e;
    e["re"] = real_table(nu.effects[i].real());
    e["im"] = real_table(nu.effects[i].imag());
    effects[nu.labels[i]] = e;
  }
  out["effects"] = effects;
  return out;
}

FinitePovm povm_from_json(const Json& j) {
  require(j.is_object() && j.contains("labels") && j.contains("dim") && j.contains("effects"),
          "povm: labels, dim and effects are required");
  require(j["labels"].is_array() && !j["labels"].empty(), "povm: labels must be a non-empty array");
  require(j["dim"].is_number_integer(), "povm: dim must be an integer");
  FinitePovm nu;
  nu.dim = j["dim"].get<Index>();
  require(nu.dim > 0, "povm: dim must be positive");
  const Json& effects = j["effects"];
  require(effects.is_object(), "povm: effects must be an object keyed by label");
  for (const Json& label : j["labels"]) {
    require(label.is_string(), "povm: labels must be strings");
    std::string name = label.get<std::string>();
    require(effects.contains(name), "povm: missing effect for label " + name);
    const Json& e = effects[name];
    require(e.is_object() && e.contains("re"), "povm: effect " + name + " needs re");
    RMat re = table_from(e["re"], nu.dim, nu.dim, "effect " + name + " re");
    RMat im = e.contains("im") ? table_from(e["im"], nu.dim, nu.dim, "effect " + name + " im")
                               : RMat(RMat::Zero(nu.dim, nu.dim));
    nu.labels.push_back(name);
    nu.effects.push_back(re.cast<cplx>() + cplx(0.0, 1.0) * im.cast<cplx>());
  }
  return nu;
}

FinitePovm read_povm_file(const std::string& path) {
  try {
    return povm_from_json(read_json_file(path));
  } catch (const InvalidInput& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

std::map<std::string, cplx> scalar_function_from_json(const Json& j) {
  require(j.is_object() && j.contains("values") && j["values"].is_object(),
          "scalar function: values object is required");
  std::map<std::string, cplx> out;
  for (auto it = j["values"].begin(); it != j["values"].end(); ++it)
    out[it.key()] = scalar_from(it.value(), "scalar function value " + it.key());
  return out;
}

std::map<std::string, cplx> read_scalar_function_file(const std::string& path) {
  try {
    return scalar_function_from_json(read_json_file(path));
  } catch (const InvalidInput& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 1099511628211ull;
  }
  return h;
}

std::string json_digest(const Json& j) {
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(j.dump());
  return hex.str();
}

}  // namespace gateaux
