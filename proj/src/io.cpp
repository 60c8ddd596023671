#include "explab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace explab {
namespace {

[[noreturn]] void parse_fail(const std::string& where, const std::string& what) {
  fail(ErrorCode::parse, where + ": " + what);
}

const Json& require_field(const Json& doc, const char* key, const std::string& where) {
  auto it = doc.find(key);
  if (it == doc.end()) parse_fail(where, std::string("missing field \"") + key + "\"");
  return *it;
}

double as_real(const Json& v, const std::string& where) {
  if (!v.is_number()) parse_fail(where, "expected a number, got " + std::string(v.type_name()));
  return v.get<double>();
}

int as_int(const Json& v, const std::string& where) {
  if (!v.is_number_integer() && !v.is_number_unsigned())
    parse_fail(where, "expected an integer, got " + std::string(v.type_name()));
  auto raw = v.get<std::int64_t>();
  if (raw < INT32_MIN || raw > INT32_MAX) parse_fail(where, "integer out of range");
  return static_cast<int>(raw);
}

std::string as_string(const Json& v, const std::string& where) {
  if (!v.is_string()) parse_fail(where, "expected a string, got " + std::string(v.type_name()));
  return v.get<std::string>();
}

const Json& as_array(const Json& v, const std::string& where) {
  if (!v.is_array()) parse_fail(where, "expected an array, got " + std::string(v.type_name()));
  return v;
}

void require_schema_version(const Json& doc, const std::string& where) {
  const Json& v = require_field(doc, "schema_version", where);
  if (as_int(v, where + ".schema_version") != 1)
    parse_fail(where, "unsupported schema_version " + v.dump());
}

std::vector<std::string> string_list(const Json& v, const std::string& where) {
  const Json& arr = as_array(v, where);
  std::vector<std::string> out;
  out.reserve(arr.size());
  for (size_t i = 0; i < arr.size(); ++i) out.push_back(as_string(arr[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

Vec real_list(const Json& v, const std::string& where) {
  const Json& arr = as_array(v, where);
  Vec out(arr.size());
  for (size_t i = 0; i < arr.size(); ++i) out(static_cast<int>(i)) = as_real(arr[i], where + "[" + std::to_string(i) + "]");
  return out;
}

std::vector<int> int_list(const Json& v, const std::string& where) {
  const Json& arr = as_array(v, where);
  std::vector<int> out;
  out.reserve(arr.size());
  for (size_t i = 0; i < arr.size(); ++i) out.push_back(as_int(arr[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

Mat real_matrix(const Json& v, const std::string& where) {
  const Json& rows = as_array(v, where);
  if (rows.empty()) parse_fail(where, "empty matrix");
  Mat m(rows.size(), as_array(rows[0], where + "[0]").size());
  for (size_t i = 0; i < rows.size(); ++i) {
    std::string row_where = where + "[" + std::to_string(i) + "]";
    Vec row = real_list(rows[i], row_where);
    if (row.size() != m.cols()) parse_fail(row_where, "ragged matrix row");
    m.row(static_cast<int>(i)) = row.transpose();
  }
  return m;
}

Json matrix_to_rows(const Mat& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vec_to_list(const Vec& v) {
  Json out = Json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

// One action object (shared between standalone actions and chain levels).
// Accepts an optional "metric" field and, at chain levels, leaves
// "project_to_previous" to the caller.
ActionDocument action_from_object(const Json& doc, const std::string& where) {
  std::vector<std::string> ids = string_list(require_field(doc, "points", where), where + ".points");
  Vec weights = real_list(require_field(doc, "weights", where), where + ".weights");
  const Json& gens = as_array(require_field(doc, "generators", where), where + ".generators");
  if (gens.empty()) parse_fail(where, "empty generator list");

  std::vector<std::string> symbols;
  std::vector<std::string> inverse_names;
  std::vector<int> lengths;
  std::vector<std::vector<int>> perms;
  for (size_t s = 0; s < gens.size(); ++s) {
    std::string gw = where + ".generators[" + std::to_string(s) + "]";
    const Json& g = gens[s];
    if (!g.is_object()) parse_fail(gw, "expected an object");
    symbols.push_back(as_string(require_field(g, "symbol", gw), gw + ".symbol"));
    inverse_names.push_back(as_string(require_field(g, "inverse", gw), gw + ".inverse"));
    lengths.push_back(as_int(require_field(g, "length", gw), gw + ".length"));
    perms.push_back(int_list(require_field(g, "perm", gw), gw + ".perm"));
  }
  std::vector<int> inverse(symbols.size());
  for (size_t s = 0; s < symbols.size(); ++s) {
    auto it = std::find(symbols.begin(), symbols.end(), inverse_names[s]);
    if (it == symbols.end())
      parse_fail(where + ".generators[" + std::to_string(s) + "].inverse",
                 "unknown symbol \"" + inverse_names[s] + "\"");
    inverse[s] = static_cast<int>(it - symbols.begin());
  }

  ActionDocument out{FiniteAction(FiniteMeasureSpace(std::move(ids), std::move(weights)),
                                  GeneratorSet(std::move(symbols), std::move(inverse), std::move(lengths)),
                                  std::move(perms)),
                     std::nullopt};
  if (auto it = doc.find("metric"); it != doc.end() && !it->is_null())
    out.metric = real_matrix(*it, where + ".metric");
  return out;
}

Json action_to_object(const FiniteAction& action, const std::optional<Mat>& metric) {
  Json doc = Json::object();
  doc["points"] = action.space().ids();
  doc["weights"] = vec_to_list(action.space().weights());
  Json gens = Json::array();
  for (int s = 0; s < action.gens().count(); ++s) {
    Json g = Json::object();
    g["symbol"] = action.gens().symbol(s);
    g["inverse"] = action.gens().symbol(action.gens().inverse(s));
    g["length"] = action.gens().length(s);
    g["perm"] = action.perm(s);
    gens.push_back(std::move(g));
  }
  doc["generators"] = std::move(gens);
  if (metric) doc["metric"] = matrix_to_rows(*metric);
  return doc;
}

bool needs_csv_quotes(const std::string& s) {
  return s.find_first_of(",\"\n\r") != std::string::npos;
}

std::string csv_field(const std::string& s) {
  if (!needs_csv_quotes(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void dump_value(std::string& out, const Json& v, int depth);

bool all_scalars(const Json& arr) {
  for (const auto& v : arr)
    if (v.is_array() || v.is_object()) return false;
  return true;
}

void dump_scalar(std::string& out, const Json& v) {
  switch (v.type()) {
    case Json::value_t::number_float:
      out += format_real(v.get<double>());
      break;
    case Json::value_t::number_integer:
      out += std::to_string(v.get<std::int64_t>());
      break;
    case Json::value_t::number_unsigned:
      out += std::to_string(v.get<std::uint64_t>());
      break;
    case Json::value_t::string:
      out += v.dump();  // reuse the library's escaping
      break;
    case Json::value_t::boolean:
      out += v.get<bool>() ? "true" : "false";
      break;
    default:
      out += "null";
      break;
  }
}

void dump_value(std::string& out, const Json& v, int depth) {
  std::string pad(2 * static_cast<size_t>(depth), ' ');
  std::string pad_in(2 * static_cast<size_t>(depth + 1), ' ');
  if (v.is_object()) {
    if (v.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (auto it = v.begin(); it != v.end(); ++it) {
      if (!first) out += ",\n";
      first = false;
      out += pad_in;
      out += Json(it.key()).dump();
      out += ": ";
      dump_value(out, it.value(), depth + 1);
    }
    out += "\n" + pad + "}";
  } else if (v.is_array()) {
    if (v.empty()) {
      out += "[]";
      return;
    }
    if (all_scalars(v)) {
      out += "[";
      bool first = true;
      for (const auto& e : v) {
        if (!first) out += ", ";
        first = false;
        dump_scalar(out, e);
      }
      out += "]";
      return;
    }
    out += "[\n";
    bool first = true;
    for (const auto& e : v) {
      if (!first) out += ",\n";
      first = false;
      out += pad_in;
      dump_value(out, e, depth + 1);
    }
    out += "\n" + pad + "]";
  } else {
    dump_scalar(out, v);
  }
}

}  // namespace

std::string format_real(double x) {
  if (std::isnan(x)) return "\"nan\"";
  if (std::isinf(x)) return x > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s = buf;
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

Json json_real(double x) {
  if (std::isnan(x)) return Json("nan");
  if (std::isinf(x)) return Json(x > 0 ? "inf" : "-inf");
  return Json(x);
}

Json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    parse_fail(origin, e.what());
  }
}

Json parse_json_file(const std::string& path) {
  return parse_json_text(read_text_file(path), path);
}

std::string dump_json(const Json& doc) {
  std::string out;
  dump_value(out, doc, 0);
  out += '\n';
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::parse, path + ": cannot open for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::invalid_argument, path + ": cannot open for writing");
  out << content;
  if (!out) fail(ErrorCode::invalid_argument, path + ": write failed");
}

std::string document_kind(const Json& doc) {
  if (!doc.is_object()) fail(ErrorCode::parse, "document: expected a JSON object");
  if (doc.contains("transition")) return "kernel";
  if (doc.contains("levels")) return "chain";
  if (doc.contains("generators")) return "action";
  fail(ErrorCode::parse, "document: none of \"transition\", \"generators\", \"levels\" present");
}

MarkovKernel kernel_from_json(const Json& doc, const Tolerances& tol) {
  const std::string where = "kernel";
  if (!doc.is_object()) parse_fail(where, "expected a JSON object");
  require_schema_version(doc, where);
  std::vector<std::string> ids = string_list(require_field(doc, "points", where), where + ".points");
  Vec weights = real_list(require_field(doc, "weights", where), where + ".weights");
  Mat p = real_matrix(require_field(doc, "transition", where), where + ".transition");
  std::optional<Vec> m;
  if (auto it = doc.find("reversing_measure"); it != doc.end() && !it->is_null())
    m = real_list(*it, where + ".reversing_measure");
  return MarkovKernel(FiniteMeasureSpace(std::move(ids), std::move(weights)), std::move(p), std::move(m), tol);
}

Json kernel_to_json(const MarkovKernel& kernel) {
  Json doc = Json::object();
  doc["schema_version"] = 1;
  doc["points"] = kernel.space().ids();
  doc["weights"] = vec_to_list(kernel.space().weights());
  doc["transition"] = matrix_to_rows(kernel.transition());
  doc["reversing_measure"] = kernel.reversing_measure() ? vec_to_list(*kernel.reversing_measure()) : Json();
  return doc;
}

ActionDocument action_from_json(const Json& doc) {
  const std::string where = "action";
  if (!doc.is_object()) parse_fail(where, "expected a JSON object");
  require_schema_version(doc, where);
  return action_from_object(doc, where);
}

Json action_to_json(const FiniteAction& action, const std::optional<Mat>& metric) {
  Json doc = Json::object();
  doc["schema_version"] = 1;
  Json body = action_to_object(action, metric);
  for (auto it = body.begin(); it != body.end(); ++it) doc[it.key()] = std::move(it.value());
  return doc;
}

ActionChain chain_from_json(const Json& doc) {
  const std::string where = "chain";
  if (!doc.is_object()) parse_fail(where, "expected a JSON object");
  require_schema_version(doc, where);
  const Json& levels = as_array(require_field(doc, "levels", where), where + ".levels");
  if (levels.empty()) parse_fail(where, "empty level list");
  std::vector<FiniteAction> actions;
  std::vector<std::vector<int>> projections;
  for (size_t i = 0; i < levels.size(); ++i) {
    std::string lw = where + ".levels[" + std::to_string(i) + "]";
    if (!levels[i].is_object()) parse_fail(lw, "expected an object");
    actions.push_back(action_from_object(levels[i], lw).action);
    if (i == 0) {
      projections.emplace_back();
    } else {
      projections.push_back(int_list(require_field(levels[i], "project_to_previous", lw), lw + ".project_to_previous"));
    }
  }
  return gen_schreier_chain(std::move(actions), std::move(projections));
}

Json chain_to_json(const ActionChain& chain) {
  Json doc = Json::object();
  doc["schema_version"] = 1;
  Json levels = Json::array();
  for (size_t i = 0; i < chain.levels.size(); ++i) {
    Json level = action_to_object(chain.levels[i], std::nullopt);
    if (i > 0) level["project_to_previous"] = chain.projections[i];
    levels.push_back(std::move(level));
  }
  doc["levels"] = std::move(levels);
  return doc;
}

AnyDocument load_document(const std::string& path, const Tolerances& tol) {
  Json doc = parse_json_file(path);
  AnyDocument out;
  out.kind = document_kind(doc);
  if (out.kind == "kernel")
    out.kernel = kernel_from_json(doc, tol);
  else if (out.kind == "action")
    out.action = action_from_json(doc);
  else
    out.chain = chain_from_json(doc);
  return out;
}

std::string matrix_to_csv(const Mat& m, const std::vector<std::string>& row_ids,
                          const std::vector<std::string>& col_ids) {
  if (m.rows() != static_cast<int>(row_ids.size()) || m.cols() != static_cast<int>(col_ids.size()))
    fail(ErrorCode::invalid_argument, "csv: label count does not match matrix shape");
  std::string out;
  for (const auto& id : col_ids) {
    out += ',';
    out += csv_field(id);
  }
  out += '\n';
  for (int i = 0; i < m.rows(); ++i) {
    out += csv_field(row_ids[static_cast<size_t>(i)]);
    for (int j = 0; j < m.cols(); ++j) {
      out += ',';
      double x = m(i, j);
      if (std::isfinite(x)) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        out += buf;
      } else {
        out += std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
      }
    }
    out += '\n';
  }
  return out;
}

std::string matrix_to_csv(const Mat& m, const std::vector<std::string>& ids) {
  return matrix_to_csv(m, ids, ids);
}

std::string vector_to_csv(const Vec& v, const std::vector<std::string>& ids, const std::string& column) {
  if (v.size() != static_cast<int>(ids.size()))
    fail(ErrorCode::invalid_argument, "csv: label count does not match vector length");
  Mat m(v.size(), 1);
  m.col(0) = v;
  return matrix_to_csv(m, ids, {column});
}

}  // namespace explab
