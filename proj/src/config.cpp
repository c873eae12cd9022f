#include "lngp/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace lngp {

namespace {

using nlohmann::json;

json vec_to_json(const Vector& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vector vec_from_json(const json& a, const char* what) {
  if (!a.is_array()) throw ValidationError(std::string(what) + ": expected array");
  Vector v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number())
      throw ValidationError(std::string(what) + ": expected numbers");
    v[static_cast<int>(i)] = a[i].get<double>();
  }
  return v;
}

json mat_to_json(const Matrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Matrix mat_from_json(const json& a, const char* what) {
  if (!a.is_array() || a.empty())
    throw ValidationError(std::string(what) + ": expected array of rows");
  const std::size_t cols = a[0].is_array() ? a[0].size() : 0;
  if (cols == 0)
    throw ValidationError(std::string(what) + ": expected array of rows");
  Matrix m(a.size(), cols);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_array() || a[i].size() != cols)
      throw ValidationError(std::string(what) + ": ragged matrix");
    for (std::size_t j = 0; j < cols; ++j) {
      if (!a[i][j].is_number())
        throw ValidationError(std::string(what) + ": expected numbers");
      m(static_cast<int>(i), static_cast<int>(j)) = a[i][j].get<double>();
    }
  }
  return m;
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void maybe_vec(const json& j, const char* key, Vector& out) {
  if (j.contains(key)) out = vec_from_json(j.at(key), key);
}

void maybe_mat(const json& j, const char* key, Matrix& out) {
  if (j.contains(key)) out = mat_from_json(j.at(key), key);
}

void chain_from_json(const json& j, ChainConfig& c) {
  maybe(j, "K", c.K);
  maybe(j, "m", c.m);
  maybe(j, "iters", c.iters);
  maybe(j, "burnin", c.burnin);
  maybe(j, "thin", c.thin);
  maybe(j, "seed", c.seed);
  maybe(j, "adapt_target", c.adapt_target);
  maybe(j, "adapt_decay", c.adapt_decay);
  maybe(j, "progress", c.progress);
}

json chain_to_json(const ChainConfig& c) {
  return json{{"K", c.K},
              {"m", c.m},
              {"iters", c.iters},
              {"burnin", c.burnin},
              {"thin", c.thin},
              {"seed", c.seed},
              {"adapt_target", c.adapt_target},
              {"adapt_decay", c.adapt_decay},
              {"progress", c.progress}};
}

void priors_from_json(const json& j, Priors& p) {
  if (j.contains("xi_mean")) {
    const Vector v = vec_from_json(j.at("xi_mean"), "xi_mean");
    if (v.size() != 2) throw ValidationError("xi_mean must have length 2");
    p.xi_mean = v;
  }
  if (j.contains("xi_cov")) {
    const Matrix m = mat_from_json(j.at("xi_cov"), "xi_cov");
    if (m.rows() != 2 || m.cols() != 2)
      throw ValidationError("xi_cov must be 2x2");
    p.xi_cov = m;
  }
  maybe(j, "omega_iw_df", p.omega_iw_df);
  if (j.contains("omega_iw_scale")) {
    const Matrix m = mat_from_json(j.at("omega_iw_scale"), "omega_iw_scale");
    if (m.rows() != 2 || m.cols() != 2)
      throw ValidationError("omega_iw_scale must be 2x2");
    p.omega_iw_scale = m;
  }
  maybe(j, "decay_lower", p.decay_lower);
  maybe(j, "decay_upper", p.decay_upper);
  maybe(j, "beta_mean", p.beta_mean);
  maybe(j, "beta_var", p.beta_var);
  maybe(j, "sigma_star_iw_df", p.sigma_star_iw_df);
  maybe_mat(j, "sigma_star_iw_scale", p.sigma_star_iw_scale);
}

json priors_to_json(const Priors& p) {
  json j{{"xi_mean", vec_to_json(p.xi_mean)},
         {"xi_cov", mat_to_json(p.xi_cov)},
         {"omega_iw_df", p.omega_iw_df},
         {"omega_iw_scale", mat_to_json(p.omega_iw_scale)},
         {"decay_lower", p.decay_lower},
         {"decay_upper", p.decay_upper},
         {"beta_mean", p.beta_mean},
         {"beta_var", p.beta_var},
         {"sigma_star_iw_df", p.sigma_star_iw_df}};
  if (p.sigma_star_iw_scale.size() > 0)
    j["sigma_star_iw_scale"] = mat_to_json(p.sigma_star_iw_scale);
  return j;
}

void sim_from_json(const json& j, SimScenario& s) {
  maybe(j, "T", s.T);
  maybe(j, "time_span", s.time_span);
  maybe_vec(j, "beta", s.gp.beta);
  maybe_mat(j, "sigma_star", s.gp.sigma_star);
  maybe_vec(j, "decays", s.gp.decays);
  if (j.contains("xi")) {
    const json& a = j.at("xi");
    if (!a.is_array()) throw ValidationError("xi: expected array of pairs");
    s.mixture.xi.clear();
    for (const json& e : a) {
      const Vector v = vec_from_json(e, "xi");
      if (v.size() != 2) throw ValidationError("xi entries must be pairs");
      s.mixture.xi.push_back(Vec2(v[0], v[1]));
    }
  }
  if (j.contains("omega_cov")) {
    const json& a = j.at("omega_cov");
    if (!a.is_array())
      throw ValidationError("omega_cov: expected array of matrices");
    s.mixture.omega_cov.clear();
    for (const json& e : a) {
      const Matrix m = mat_from_json(e, "omega_cov");
      if (m.rows() != 2 || m.cols() != 2)
        throw ValidationError("omega_cov entries must be 2x2");
      s.mixture.omega_cov.push_back(m);
    }
  }
}

json sim_to_json(const SimScenario& s) {
  json xi = json::array();
  for (const Vec2& v : s.mixture.xi) xi.push_back(json{v[0], v[1]});
  json oc = json::array();
  for (const Mat2& m : s.mixture.omega_cov) oc.push_back(mat_to_json(m));
  return json{{"T", s.T},
              {"time_span", s.time_span},
              {"beta", vec_to_json(s.gp.beta)},
              {"sigma_star", mat_to_json(s.gp.sigma_star)},
              {"decays", vec_to_json(s.gp.decays)},
              {"xi", xi},
              {"omega_cov", oc}};
}

}  // namespace

std::vector<double> report_lags(const ReportSpec& rep) {
  if (!rep.lags.empty()) return rep.lags;
  std::vector<double> lags(41);
  for (int i = 0; i < 41; ++i) lags[i] = 2.0 * i / 40.0;
  return lags;
}

void RunConfig::validate_common() const {
  chain.validate();
  priors.validate(chain.K);
  if (!(report.lower > 0.0 && report.lower < report.upper &&
        report.upper < 1.0))
    throw ValidationError("report quantiles must satisfy 0 < lo < hi < 1");
  if (report.theta_points < 8)
    throw ValidationError("theta_points must be at least 8");
  if (report.r_points < 8)
    throw ValidationError("r_points must be at least 8");
  if (report.mc_draws < 2)
    throw ValidationError("mc_draws must be at least 2");
  if (report.r_max < 0.0)
    throw ValidationError("r_max must be nonnegative");
  for (double l : report.lags)
    if (l < 0.0) throw ValidationError("lags must be nonnegative");
  if (out.empty()) throw ValidationError("output directory must be set");
}

RunConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config parse error: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("config root must be an object");

  RunConfig cfg;
  try {
    if (j.contains("chain")) chain_from_json(j.at("chain"), cfg.chain);
    if (j.contains("priors")) priors_from_json(j.at("priors"), cfg.priors);
    if (j.contains("data")) {
      const json& d = j.at("data");
      maybe(d, "path", cfg.data.path);
      maybe(d, "format", cfg.data.format);
      maybe(d, "t0", cfg.data.t0);
      maybe(d, "step_seconds", cfg.data.step_seconds);
      maybe(d, "snap_tol_seconds", cfg.data.snap_tol_seconds);
      maybe(d, "time_unit_seconds", cfg.data.time_unit_seconds);
    }
    if (j.contains("design")) {
      const json& d = j.at("design");
      maybe(d, "type", cfg.design.type);
      maybe(d, "window_breaks", cfg.design.window_breaks);
      maybe(d, "path", cfg.design.path);
    }
    if (j.contains("sim")) sim_from_json(j.at("sim"), cfg.sim);
    if (j.contains("select")) {
      const json& s = j.at("select");
      maybe(s, "K_list", cfg.select.K_list);
      maybe(s, "m_list", cfg.select.m_list);
    }
    if (j.contains("report")) {
      const json& r = j.at("report");
      maybe(r, "lower", cfg.report.lower);
      maybe(r, "upper", cfg.report.upper);
      maybe(r, "mc_draws", cfg.report.mc_draws);
      maybe(r, "theta_points", cfg.report.theta_points);
      maybe(r, "r_points", cfg.report.r_points);
      maybe(r, "r_max", cfg.report.r_max);
      maybe(r, "lags", cfg.report.lags);
    }
    maybe(j, "out", cfg.out);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config field error: ") + e.what());
  }
  return cfg;
}

RunConfig config_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json_text(buf.str());
}

std::string config_to_json_text(const RunConfig& cfg) {
  json j;
  j["chain"] = chain_to_json(cfg.chain);
  j["priors"] = priors_to_json(cfg.priors);
  j["data"] = json{{"path", cfg.data.path},
                   {"format", cfg.data.format},
                   {"t0", cfg.data.t0},
                   {"step_seconds", cfg.data.step_seconds},
                   {"snap_tol_seconds", cfg.data.snap_tol_seconds},
                   {"time_unit_seconds", cfg.data.time_unit_seconds}};
  j["design"] = json{{"type", cfg.design.type},
                     {"window_breaks", cfg.design.window_breaks},
                     {"path", cfg.design.path}};
  j["sim"] = sim_to_json(cfg.sim);
  j["select"] =
      json{{"K_list", cfg.select.K_list}, {"m_list", cfg.select.m_list}};
  j["report"] = json{{"lower", cfg.report.lower},
                     {"upper", cfg.report.upper},
                     {"mc_draws", cfg.report.mc_draws},
                     {"theta_points", cfg.report.theta_points},
                     {"r_points", cfg.report.r_points},
                     {"r_max", cfg.report.r_max},
                     {"lags", cfg.report.lags}};
  j["out"] = cfg.out;
  return j.dump(2) + "\n";
}

}  // namespace lngp
