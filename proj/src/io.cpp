#include "baycausal/io.hpp"

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_map>

namespace baycausal::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, ',')) out.push_back(trim(cur));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void parse_fail(const std::string& path, long line,
                             const std::string& what) {
  std::ostringstream os;
  os << path << ":" << line << ": " << what;
  throw ParseError(os.str());
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = {}) {
  std::ofstream os(path, std::ios::out | std::ios::trunc | mode);
  if (!os) throw ValidationError("cannot open " + path + " for writing");
  return os;
}

}  // namespace

void write_csv(const std::string& path, const Dataset& data) {
  std::ofstream os = open_out(path);
  for (int q = 0; q < data.Q(); ++q) os << (q ? "," : "") << "Y" << q + 1;
  for (int s = 0; s < data.S(); ++s) os << ",X" << s + 1;
  os << "\n";
  for (int i = 0; i < data.n(); ++i) {
    for (int q = 0; q < data.Q(); ++q) os << (q ? "," : "") << fmt(data.Y(i, q));
    for (int s = 0; s < data.S(); ++s) os << "," << fmt(data.X(i, s));
    os << "\n";
  }
}

Dataset read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot open " + path);
  std::string line;
  long lineno = 0;
  if (!std::getline(is, line)) parse_fail(path, 1, "missing header");
  ++lineno;
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) {
    line = line.substr(3);  // UTF-8 byte order mark
  }
  const std::vector<std::string> header = split_fields(line);
  std::vector<int> y_cols, x_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string& h = header[c];
    if (!h.empty() && (h[0] == 'Y' || h[0] == 'y')) y_cols.push_back(static_cast<int>(c));
    else if (!h.empty() && (h[0] == 'X' || h[0] == 'x')) x_cols.push_back(static_cast<int>(c));
    else parse_fail(path, lineno, "header column '" + h + "' is neither Y<k> nor X<k>");
  }
  if (y_cols.empty()) parse_fail(path, lineno, "header names no Y column");

  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::vector<std::string> f = split_fields(line);
    if (f.size() != header.size()) {
      std::ostringstream os;
      os << "expected " << header.size() << " fields, found " << f.size();
      parse_fail(path, lineno, os.str());
    }
    std::vector<double> row(f.size());
    for (std::size_t c = 0; c < f.size(); ++c) {
      if (!parse_double(f[c], row[c])) {
        parse_fail(path, lineno, "cannot parse '" + f[c] + "' in column " + header[c]);
      }
      if (!std::isfinite(row[c])) {
        std::ostringstream os;
        os << path << ":" << lineno << ": non-finite value in column " << header[c];
        throw ValidationError(os.str());
      }
    }
    rows.push_back(std::move(row));
  }
  Dataset d;
  const auto n = static_cast<Eigen::Index>(rows.size());
  d.Y.resize(n, static_cast<Eigen::Index>(y_cols.size()));
  d.X.resize(n, static_cast<Eigen::Index>(x_cols.size()));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < y_cols.size(); ++k)
      d.Y(i, static_cast<Eigen::Index>(k)) = r[static_cast<std::size_t>(y_cols[k])];
    for (std::size_t k = 0; k < x_cols.size(); ++k)
      d.X(i, static_cast<Eigen::Index>(k)) = r[static_cast<std::size_t>(x_cols[k])];
  }
  return d;
}

// ---- JSON -------------------------------------------------------------------

Json to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json to_json(const Support& s) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < s.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < s.cols(); ++c) row.push_back(static_cast<bool>(s(r, c)));
    out.push_back(std::move(row));
  }
  return out;
}

Json to_json(const Eigen::MatrixXi& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

namespace {

// Rows x cols of a rectangular nested array; an empty array is 0 x 0.
std::pair<std::size_t, std::size_t> shape_of(const Json& j, const std::string& what) {
  if (!j.is_array()) throw ValidationError(what + ": expected an array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = rows ? j[0].size() : 0;
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != cols) {
      throw ValidationError(what + ": rows must be arrays of equal length");
    }
  }
  return {rows, cols};
}

}  // namespace

Matrix matrix_from_json(const Json& j, const std::string& what) {
  const auto [rows, cols] = shape_of(j, what);
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) throw ValidationError(what + ": non-numeric entry");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
  return m;
}

Vector vector_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) throw ValidationError(what + ": expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ValidationError(what + ": non-numeric entry");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

Support support_from_json(const Json& j, const std::string& what) {
  const auto [rows, cols] = shape_of(j, what);
  Support s(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      const Json& v = j[r][c];
      bool b;
      if (v.is_boolean()) b = v.get<bool>();
      else if (v.is_number()) b = v.get<double>() != 0.0;
      else throw ValidationError(what + ": entries must be boolean or numeric");
      s(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = b;
    }
  return s;
}

Json to_json(const CausalParameters& p) {
  return {{"mu", to_json(p.mu)}, {"A", to_json(p.A)}, {"B", to_json(p.B)},
          {"L", to_json(p.L)},   {"sigma2", to_json(p.sigma2)}};
}

CausalParameters parameters_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("parameter file must hold a JSON object");
  for (const char* key : {"mu", "B", "sigma2"}) {
    if (!j.contains(key)) throw ValidationError(std::string("parameter file lacks '") + key + "'");
  }
  CausalParameters p;
  p.mu = vector_from_json(j["mu"], "mu");
  p.B = matrix_from_json(j["B"], "B");
  p.sigma2 = vector_from_json(j["sigma2"], "sigma2");
  const auto Q = p.mu.size();
  p.A = j.contains("A") ? matrix_from_json(j["A"], "A") : Matrix(Q, 0);
  p.L = j.contains("L") ? matrix_from_json(j["L"], "L") : Matrix(Q, 0);
  if (p.A.size() == 0) p.A.resize(Q, 0);
  if (p.L.size() == 0) p.L.resize(Q, 0);
  return p;
}

Json to_json(const GroundTruthGraph& g) {
  return {{"b_support", to_json(g.b_support)},
          {"a_support", to_json(g.a_support)},
          {"l_support", to_json(g.l_support)},
          {"p_star", g.p_star},
          {"params", to_json(g.params)}};
}

Json to_json(const PosteriorSummary& s) {
  return {{"incl_prob_B", to_json(s.incl_prob_B)},
          {"incl_prob_A", to_json(s.incl_prob_A)},
          {"incl_prob_L", to_json(s.incl_prob_L)},
          {"mean_B", to_json(s.mean_B)},
          {"mean_A", to_json(s.mean_A)},
          {"mean_L", to_json(s.mean_L)},
          {"mean_mu", to_json(s.mean_mu)},
          {"mean_sigma2", to_json(s.mean_sigma2)},
          {"mean_A_marginal", to_json(s.mean_A_marginal)},
          {"p_star_histogram", s.p_star_histogram},
          {"modal_p_star", s.modal_p_star},
          {"n_samples", s.n_samples}};
}

Json to_json(const GraphEstimate& g) {
  return {{"b_edges", to_json(g.b_edges)},
          {"a_edges", to_json(g.a_edges)},
          {"l_edges", to_json(g.l_edges)},
          {"effects", {{"B", to_json(g.B)}, {"A", to_json(g.A)}, {"L", to_json(g.L)}}},
          {"p_star", g.p_star}};
}

Json to_json(const DiagnosticsReport& d) {
  Json acc = Json::object();
  for (const auto& [k, v] : d.acceptance) acc[k] = std::isfinite(v) ? Json(v) : Json();
  auto finite_or_null = [](double v) { return std::isfinite(v) ? Json(v) : Json(); };
  Json rs = Json::array(), es = Json::array();
  for (double v : d.rhat_sigma2) rs.push_back(finite_or_null(v));
  for (double v : d.ess_sigma2) es.push_back(finite_or_null(v));
  return {{"chains", d.chains},
          {"samples_per_chain", d.samples_per_chain},
          {"rhat_log_joint", finite_or_null(d.rhat_log_joint)},
          {"rhat_sigma2", rs},
          {"ess_log_joint", finite_or_null(d.ess_log_joint)},
          {"ess_sigma2", es},
          {"acceptance", acc}};
}

namespace {

Json score_json(const EdgeScore& s) {
  return {{"tp", s.confusion.tp}, {"fp", s.confusion.fp}, {"tn", s.confusion.tn},
          {"fn", s.confusion.fn}, {"tpr", s.tpr},          {"fdr", s.fdr},
          {"mcc", s.mcc},         {"exact", s.exact}};
}

}  // namespace

Json to_json(const RecoveryReport& r) {
  Json reps = Json::array();
  for (const auto& rep : r.replicates) {
    Json j = {{"index", rep.index}, {"seed", rep.seed}, {"ok", rep.ok}};
    if (rep.ok) {
      j["score"] = score_json(rep.score);
      j["modal_p_star"] = rep.modal_p_star;
      j["l_match"] = rep.l_match;
      j["A_estimate"] = to_json(rep.A_estimate);
    } else {
      j["error"] = rep.error;
    }
    reps.push_back(std::move(j));
  }
  return {{"scenario", r.scenario},
          {"n", r.n},
          {"replicates", reps},
          {"completed", r.completed},
          {"csr", r.csr},
          {"mean_tpr", r.mean_tpr},
          {"mean_fdr", r.mean_fdr},
          {"mean_mcc", r.mean_mcc},
          {"pooled", score_json(r.pooled)},
          {"modal_p_star_counts", r.modal_p_star_counts},
          {"l_match_count", r.l_match_count},
          {"A_truth", to_json(r.A_truth)},
          {"A_bias", to_json(r.A_bias)},
          {"A_mse", to_json(r.A_mse)}};
}

Json to_json(const Sample& s) {
  return {{"iteration", s.iteration},   {"log_joint", s.log_joint},
          {"p_star", s.p_star},         {"B", to_json(s.B)},
          {"A", to_json(s.A)},          {"L", to_json(s.L)},
          {"mu", to_json(s.mu)},        {"sigma2", to_json(s.sigma2)},
          {"gamma_beta", to_json(s.gamma_beta)},
          {"gamma_alpha", to_json(s.gamma_alpha)},
          {"delta", to_json(s.delta)},  {"pivots", s.pivots},
          {"kappa", s.kappa}};
}

Json read_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot open " + path);
  try {
    return Json::parse(is);
  } catch (const Json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_json(const std::string& path, const Json& j) {
  std::ofstream os = open_out(path);
  os << j.dump(2) << "\n";
}

Support read_b_support(const std::string& path) {
  const Json j = read_json(path);
  if (j.is_object() && j.contains("b_edges")) return support_from_json(j["b_edges"], path);
  if (j.is_object() && j.contains("b_support")) return support_from_json(j["b_support"], path);
  if (j.is_array()) return support_from_json(j, path);
  throw ValidationError(path + ": no b_edges or b_support field");
}

CausalParameters read_parameters(const std::string& path) {
  return parameters_from_json(read_json(path));
}

// ---- configuration ---------------------------------------------------------

namespace {

using Setter = std::function<void(RunConfig&, const std::string&)>;

double to_double(const std::string& key, const std::string& v) {
  double out;
  if (!parse_double(v, out)) throw ValidationError("'" + key + "' expects a number, got '" + v + "'");
  return out;
}

long long to_integer(const std::string& key, const std::string& v) {
  long long out;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ValidationError("'" + key + "' expects an integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw ValidationError("'" + key + "' expects true or false, got '" + v + "'");
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto real = [&t](const char* key, auto member) {
      t[key] = [key, member](RunConfig& c, const std::string& v) {
        member(c) = to_double(key, v);
      };
    };
    auto integer = [&t](const char* key, auto member) {
      t[key] = [key, member](RunConfig& c, const std::string& v) {
        member(c) = static_cast<std::remove_reference_t<decltype(member(c))>>(
            to_integer(key, v));
      };
    };
    real("a_nu", [](RunConfig& c) -> double& { return c.hyper.a_nu; });
    real("b_nu", [](RunConfig& c) -> double& { return c.hyper.b_nu; });
    real("a_rho", [](RunConfig& c) -> double& { return c.hyper.a_rho; });
    real("b_rho", [](RunConfig& c) -> double& { return c.hyper.b_rho; });
    real("a_sigma", [](RunConfig& c) -> double& { return c.hyper.a_sigma; });
    real("b_sigma", [](RunConfig& c) -> double& { return c.hyper.b_sigma; });
    real("a_kappa", [](RunConfig& c) -> double& { return c.hyper.a_kappa; });
    real("b_kappa", [](RunConfig& c) -> double& { return c.hyper.b_kappa; });
    real("nu0", [](RunConfig& c) -> double& { return c.hyper.nu0; });
    real("sigma2_mu", [](RunConfig& c) -> double& { return c.hyper.sigma2_mu; });
    real("b1", [](RunConfig& c) -> double& { return c.hyper.b1; });
    real("c1", [](RunConfig& c) -> double& { return c.hyper.c1; });
    real("b2", [](RunConfig& c) -> double& { return c.hyper.b2; });
    real("c2", [](RunConfig& c) -> double& { return c.hyper.c2; });
    integer("P_max", [](RunConfig& c) -> int& { return c.hyper.P_max; });
    real("p_shift", [](RunConfig& c) -> double& { return c.moves.p_shift; });
    real("p_switch", [](RunConfig& c) -> double& { return c.moves.p_switch; });
    real("p_add", [](RunConfig& c) -> double& { return c.moves.p_add; });
    real("p_split_merge", [](RunConfig& c) -> double& { return c.moves.p_split_merge; });
    real("b_step", [](RunConfig& c) -> double& { return c.options.b_step; });
    real("b_target_low", [](RunConfig& c) -> double& { return c.options.b_target_low; });
    real("b_target_high", [](RunConfig& c) -> double& { return c.options.b_target_high; });
    integer("adapt_interval", [](RunConfig& c) -> int& { return c.options.adapt_interval; });
    real("residual_floor", [](RunConfig& c) -> double& { return c.options.residual_floor; });
    real("a_step", [](RunConfig& c) -> double& { return c.options.a_step; });
    integer("iterations", [](RunConfig& c) -> int& { return c.chain.iterations; });
    integer("burn_in", [](RunConfig& c) -> int& { return c.chain.burn_in; });
    integer("thin", [](RunConfig& c) -> int& { return c.chain.thin; });
    integer("chains", [](RunConfig& c) -> int& { return c.chain.chains; });
    t["seed"] = [](RunConfig& c, const std::string& v) {
      c.chain.seed = static_cast<std::uint64_t>(to_integer("seed", v));
    };
    real("threshold", [](RunConfig& c) -> double& { return c.threshold; });
    t["b_proposal"] = [](RunConfig& c, const std::string& v) {
      if (v == "random_walk") c.options.b_proposal = BProposal::random_walk;
      else if (v == "conditional") c.options.b_proposal = BProposal::conditional;
      else throw ValidationError("b_proposal must be random_walk or conditional");
    };
    t["sigma2_conditional"] = [](RunConfig& c, const std::string& v) {
      if (v == "approximate") c.options.sigma2_conditional = Sigma2Conditional::approximate;
      else if (v == "exact") c.options.sigma2_conditional = Sigma2Conditional::exact;
      else throw ValidationError("sigma2_conditional must be approximate or exact");
    };
    t["parallel_kernels"] = [](RunConfig& c, const std::string& v) {
      c.options.parallel_kernels = to_bool("parallel_kernels", v);
    };
    return t;
  }();
  return table;
}

}  // namespace

void apply_config_text(RunConfig& config, const std::string& text,
                       const std::string& source) {
  std::istringstream is(text);
  std::string line;
  long lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) parse_fail(source, lineno, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) parse_fail(source, lineno, "unknown key '" + key + "'");
    try {
      it->second(config, value);
    } catch (const ParseError&) {
      throw;
    } catch (const ValidationError& e) {
      parse_fail(source, lineno, e.what());
    }
  }
}

RunConfig read_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  RunConfig c;
  apply_config_text(c, ss.str(), path);
  return c;
}

std::map<std::string, std::string> config_snapshot(const RunConfig& c) {
  std::map<std::string, std::string> m;
  const Hyperparameters& h = c.hyper;
  m["a_nu"] = fmt(h.a_nu);
  m["b_nu"] = fmt(h.b_nu);
  m["a_rho"] = fmt(h.a_rho);
  m["b_rho"] = fmt(h.b_rho);
  m["a_sigma"] = fmt(h.a_sigma);
  m["b_sigma"] = fmt(h.b_sigma);
  m["a_kappa"] = fmt(h.a_kappa);
  m["b_kappa"] = fmt(h.b_kappa);
  m["nu0"] = fmt(h.nu0);
  m["sigma2_mu"] = fmt(h.sigma2_mu);
  m["b1"] = fmt(h.b1);
  m["c1"] = fmt(h.c1);
  m["b2"] = fmt(h.b2);
  m["c2"] = fmt(h.c2);
  m["P_max"] = std::to_string(h.P_max);
  m["p_shift"] = fmt(c.moves.p_shift);
  m["p_switch"] = fmt(c.moves.p_switch);
  m["p_add"] = fmt(c.moves.p_add);
  m["p_split_merge"] = fmt(c.moves.p_split_merge);
  m["b_proposal"] =
      c.options.b_proposal == BProposal::random_walk ? "random_walk" : "conditional";
  m["b_step"] = fmt(c.options.b_step);
  m["b_target_low"] = fmt(c.options.b_target_low);
  m["b_target_high"] = fmt(c.options.b_target_high);
  m["adapt_interval"] = std::to_string(c.options.adapt_interval);
  m["sigma2_conditional"] =
      c.options.sigma2_conditional == Sigma2Conditional::approximate ? "approximate" : "exact";
  m["residual_floor"] = fmt(c.options.residual_floor);
  m["a_step"] = fmt(c.options.a_step);
  m["parallel_kernels"] = c.options.parallel_kernels ? "true" : "false";
  m["iterations"] = std::to_string(c.chain.iterations);
  m["burn_in"] = std::to_string(c.chain.burn_in);
  m["thin"] = std::to_string(c.chain.thin);
  m["chains"] = std::to_string(c.chain.chains);
  m["seed"] = std::to_string(c.chain.seed);
  m["threshold"] = fmt(c.threshold);
  return m;
}

// ---- sample archives ------------------------------------------------------

void write_samples_ndjson(const std::string& path,
                          const std::vector<ChainResult>& chains) {
  std::ofstream os = open_out(path);
  for (std::size_t c = 0; c < chains.size(); ++c) {
    for (const Sample& s : chains[c].samples) {
      Json j = to_json(s);
      j["chain"] = c;
      os << j.dump() << "\n";
    }
  }
}

namespace {

constexpr char kMagic[8] = {'B', 'C', 'S', 'A', 'M', 'P', '0', '1'};

struct Columns {
  std::vector<std::string> names;
  std::vector<std::vector<double>> data;
  std::unordered_map<std::string, std::size_t> index;

  std::vector<double>& col(const std::string& name) {
    const auto [it, added] = index.try_emplace(name, names.size());
    if (added) {
      names.push_back(name);
      data.emplace_back();
    }
    return data[it->second];
  }
};

template <class M>
void add_matrix(Columns& cols, const std::string& name, const M& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      cols.col(name + "[" + std::to_string(r) + "," + std::to_string(c) + "]")
          .push_back(static_cast<double>(m(r, c)));
}

}  // namespace

void write_samples_binary(const std::string& path,
                          const std::vector<ChainResult>& chains) {
  Columns cols;
  std::uint64_t rows = 0;
  for (std::size_t c = 0; c < chains.size(); ++c) {
    for (const Sample& s : chains[c].samples) {
      ++rows;
      cols.col("chain").push_back(static_cast<double>(c));
      cols.col("iteration").push_back(s.iteration);
      cols.col("log_joint").push_back(s.log_joint);
      cols.col("p_star").push_back(s.p_star);
      cols.col("kappa").push_back(s.kappa);
      add_matrix(cols, "B", s.B);
      add_matrix(cols, "A", s.A);
      add_matrix(cols, "L", s.L);
      add_matrix(cols, "mu", s.mu);
      add_matrix(cols, "sigma2", s.sigma2);
      add_matrix(cols, "gamma_beta", s.gamma_beta);
      add_matrix(cols, "gamma_alpha", s.gamma_alpha);
      add_matrix(cols, "delta", s.delta);
      for (std::size_t p = 0; p < s.pivots.size(); ++p)
        cols.col("pivot[" + std::to_string(p) + "]").push_back(s.pivots[p]);
    }
  }
  std::ofstream os = open_out(path, std::ios::binary);
  os.write(kMagic, sizeof kMagic);
  const std::uint64_t nfields = cols.names.size();
  os.write(reinterpret_cast<const char*>(&rows), sizeof rows);
  os.write(reinterpret_cast<const char*>(&nfields), sizeof nfields);
  for (const auto& name : cols.names) os.write(name.c_str(), static_cast<long>(name.size() + 1));
  for (const auto& column : cols.data)
    os.write(reinterpret_cast<const char*>(column.data()),
             static_cast<long>(column.size() * sizeof(double)));
}

ColumnarSamples read_samples_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot open " + path);
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw ParseError(path + ": not a sample archive");
  }
  std::uint64_t rows = 0, nfields = 0;
  is.read(reinterpret_cast<char*>(&rows), sizeof rows);
  is.read(reinterpret_cast<char*>(&nfields), sizeof nfields);
  ColumnarSamples out;
  for (std::uint64_t f = 0; f < nfields; ++f) {
    std::string name;
    std::getline(is, name, '\0');
    out.names.push_back(name);
  }
  for (std::uint64_t f = 0; f < nfields; ++f) {
    std::vector<double> col(rows);
    is.read(reinterpret_cast<char*>(col.data()), static_cast<long>(rows * sizeof(double)));
    out.columns.push_back(std::move(col));
  }
  if (!is) throw ParseError(path + ": truncated sample archive");
  return out;
}

}  // namespace baycausal::io
