#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "explab/families.hpp"
#include "explab/markov.hpp"

namespace explab {

// Insertion-ordered documents: writers emit keys in schema order, so equal
// inputs produce byte-identical files.
using Json = nlohmann::ordered_json;

// Syntax and shape errors carry the origin label and line/column info and
// map to the parse exit code.
Json parse_json_text(const std::string& text, const std::string& origin);
Json parse_json_file(const std::string& path);

// Two-space indent, arrays of scalars on one line, reals printed with 17
// significant digits (non-finite reals become the strings "inf", "-inf",
// "nan"). Ends with a newline.
std::string dump_json(const Json& doc);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// "kernel", "action" or "chain", decided by the discriminating field
// (transition / generators / levels).
std::string document_kind(const Json& doc);

MarkovKernel kernel_from_json(const Json& doc, const Tolerances& tol = default_tolerances());
Json kernel_to_json(const MarkovKernel& kernel);

// Actions carry an optional base metric over the atoms. Loaders accept a
// missing metric; consumers that need one fall back to the diameter-2
// normalization of the word-length metric when the orbit is connected.
struct ActionDocument {
  FiniteAction action;
  std::optional<Mat> metric;
};

ActionDocument action_from_json(const Json& doc);
Json action_to_json(const FiniteAction& action, const std::optional<Mat>& metric = std::nullopt);

ActionChain chain_from_json(const Json& doc);
Json chain_to_json(const ActionChain& chain);

// One input file of any document kind; exactly one member is set.
struct AnyDocument {
  std::string kind;
  std::optional<MarkovKernel> kernel;
  std::optional<ActionDocument> action;
  std::optional<ActionChain> chain;
};
AnyDocument load_document(const std::string& path, const Tolerances& tol = default_tolerances());

// RFC 4180 rows; first header cell is empty, then column labels. Reals use
// the same 17-digit format as JSON output.
std::string matrix_to_csv(const Mat& m, const std::vector<std::string>& row_ids,
                          const std::vector<std::string>& col_ids);
std::string matrix_to_csv(const Mat& m, const std::vector<std::string>& ids);
std::string vector_to_csv(const Vec& v, const std::vector<std::string>& ids, const std::string& column);

// Shared real formatting: %.17g with a ".0" suffix when no exponent or
// point survives, strings for non-finite values.
std::string format_real(double x);

// Json number from a possibly non-finite double (string fallback), for
// report builders.
Json json_real(double x);

}  // namespace explab
