#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "baycausal/evaluation.hpp"

namespace baycausal::io {

using Json = nlohmann::json;

// Malformed input file; the message carries the path and line number.
class ParseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// CSV with a mandatory header. Columns named Y<k> are primary variables,
// X<k> covariates, each taken in header order. Comma separated, LF or CRLF.
void write_csv(const std::string& path, const Dataset& data);
Dataset read_csv(const std::string& path);

Json to_json(const Matrix& m);
Json to_json(const Vector& v);
Json to_json(const Support& s);
Json to_json(const Eigen::MatrixXi& m);
Matrix matrix_from_json(const Json& j, const std::string& what);
Vector vector_from_json(const Json& j, const std::string& what);
Support support_from_json(const Json& j, const std::string& what);

Json to_json(const CausalParameters& p);
CausalParameters parameters_from_json(const Json& j);
Json to_json(const GroundTruthGraph& g);

Json to_json(const PosteriorSummary& s);
Json to_json(const GraphEstimate& g);
Json to_json(const DiagnosticsReport& d);
Json to_json(const RecoveryReport& r);
Json to_json(const Sample& s);

Json read_json(const std::string& path);
void write_json(const std::string& path, const Json& j);

// Reads the primary-variable support from a graph ("b_edges") or truth
// ("b_support") document.
Support read_b_support(const std::string& path);

// Parameter file for `simulate`: a JSON object with mu, A, B, L, sigma2.
CausalParameters read_parameters(const std::string& path);

// Everything a `key = value` configuration file can set.
struct RunConfig {
  Hyperparameters hyper;
  MoveConfig moves;
  SamplerOptions options;
  ChainConfig chain;
  double threshold = 0.5;
};

// Applies `key = value` lines; `#` starts a comment, blank lines are skipped.
// Unknown keys and malformed values are errors.
void apply_config_text(RunConfig& config, const std::string& text,
                       const std::string& source = "<config>");
RunConfig read_config(const std::string& path);
std::map<std::string, std::string> config_snapshot(const RunConfig& config);

// One JSON object per line, one line per retained sample, chains in order.
void write_samples_ndjson(const std::string& path,
                          const std::vector<ChainResult>& chains);

// Columnar float64 dump: magic "BCSAMP01", then uint64 counts (rows, fields),
// the field names as NUL-terminated strings, then one column per field.
void write_samples_binary(const std::string& path,
                          const std::vector<ChainResult>& chains);

struct ColumnarSamples {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
};
ColumnarSamples read_samples_binary(const std::string& path);

}  // namespace baycausal::io
