#include "lngp/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "lngp/csv.hpp"
#include "lngp/sampler.hpp"
#include "lngp/timeutil.hpp"
#include "lngp/trajectory.hpp"

namespace fs = std::filesystem;

namespace lngp {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double now_seconds() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

void ensure_dir(const std::string& path) {
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) throw Error("cannot create directory " + path + ": " + ec.message());
}

void gate_output(const std::string& path, bool force) {
  if (!force && fs::exists(path))
    throw ValidationError("output exists: " + path +
                          " (pass --force to overwrite)");
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw Error("failed writing " + path);
}

void write_json_file(const std::string& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

double parse_cell(const std::string& s, const std::string& what, int line) {
  if (s.empty()) return kNaN;
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw ValidationError(what + ": malformed number '" + s + "' at line " +
                          std::to_string(line));
  return v;
}

bool parse_flag(const std::string& s, const std::string& what, int line) {
  if (s == "1") return true;
  if (s == "0") return false;
  throw ValidationError(what + ": expected 0 or 1, got '" + s +
                        "' at line " + std::to_string(line));
}

// Rotated increment i from grid coordinates: displacement i+1 -> i+2
// expressed in the frame of the heading of displacement i -> i+1.
Vec2 grid_increment(const Matrix& coords, int i) {
  const double bx = coords(i + 1, 0) - coords(i, 0);
  const double by = coords(i + 1, 1) - coords(i, 1);
  const double norm = std::sqrt(bx * bx + by * by);
  const double dx = coords(i + 2, 0) - coords(i + 1, 0);
  const double dy = coords(i + 2, 1) - coords(i + 1, 1);
  if (norm == 0.0) return Vec2(dx, dy);
  const double c = bx / norm, s = by / norm;
  return Vec2(c * dx + s * dy, -s * dx + c * dy);
}

ModelData data_from_grid(Matrix coords, std::vector<bool> observed,
                         const Vector& times) {
  const int total = static_cast<int>(coords.rows());
  const int n = total - 2;
  ModelData data;
  data.has_grid = true;
  data.coords = std::move(coords);
  data.coords_observed = std::move(observed);
  data.times = times;
  data.y = Matrix::Constant(n, 2, kNaN);
  data.y_observed.assign(n, false);
  for (int i = 0; i < n; ++i) {
    if (data.coords_observed[i] && data.coords_observed[i + 1] &&
        data.coords_observed[i + 2]) {
      data.y.row(i) = grid_increment(data.coords, i).transpose();
      data.y_observed[i] = true;
    }
  }
  return data;
}

json config_json(const RunConfig& cfg) {
  return json::parse(config_to_json_text(cfg));
}

json store_manifest(const RunConfig& cfg, const SampleStore& store,
                    const ICLEntry& icl, const std::string& command) {
  json j;
  j["command"] = command;
  j["config"] = config_json(cfg);
  j["K"] = store.K;
  j["m"] = cfg.chain.m;
  j["seed"] = cfg.chain.seed;
  j["n"] = store.T;
  j["n_obs"] = store.n_obs;
  j["retained"] = store.size();
  j["map_index"] = icl.map_index;
  j["icl_value"] = icl.value;
  j["icl_printed"] = icl.printed;
  j["nu"] = icl.nu;
  j["final_accept_rate"] = store.final_accept_rate;
  return j;
}

// Fit artifacts written into `dir`; returns the manifest JSON (without
// the checksum block, which the caller adds after all files exist).
struct FitResult {
  SampleStore store;
  ICLEntry icl;
  std::vector<std::string> files;  // relative names of written CSVs
};

FitResult run_fit_cell(const RunConfig& cfg, const ModelData& data,
                       const std::string& dir, bool force,
                       bool write_reports) {
  std::vector<std::string> names = {"samples.csv"};
  if (write_reports) {
    names.insert(names.end(), {"probabilities.csv", "angle_density.csv",
                               "step_density.csv", "logratio.csv"});
  }
  for (const std::string& f : names) gate_output(dir + "/" + f, force);
  gate_output(dir + "/manifest.json", force);

  Chain chain(data, cfg.chain, cfg.priors);
  FitResult result;
  result.store = chain.run();
  relabel_store(result.store);
  result.icl = icl_score(result.store, cfg.chain.m);

  const SampleStore& store = result.store;
  store.write_samples_csv(dir + "/samples.csv");
  result.files.push_back("samples.csv");
  if (!write_reports) return result;

  // Mixing-probability bands per time point.
  {
    const ProbBands bands =
        probability_timeseries(store, cfg.report.lower, cfg.report.upper);
    std::vector<std::string> header = {"index", "time"};
    for (int k = 1; k <= store.K; ++k) {
      header.push_back("pi." + std::to_string(k) + ".mean");
      header.push_back("pi." + std::to_string(k) + ".lower");
      header.push_back("pi." + std::to_string(k) + ".upper");
    }
    CsvWriter w(header);
    for (int t = 0; t < store.T; ++t) {
      std::vector<double> row = {static_cast<double>(t), data.times[t]};
      for (int k = 0; k < store.K; ++k) {
        row.push_back(bands.mean(t, k));
        row.push_back(bands.lower(t, k));
        row.push_back(bands.upper(t, k));
      }
      w.add_row(row);
    }
    w.write(dir + "/probabilities.csv");
    result.files.push_back("probabilities.csv");
  }

  // Posterior predictive turning-angle densities.
  {
    Vector grid(cfg.report.theta_points);
    for (int j = 0; j < cfg.report.theta_points; ++j)
      grid[j] = 2.0 * M_PI * j / cfg.report.theta_points;
    const Matrix dens = angle_density(store, grid);
    std::vector<std::string> header = {"theta"};
    for (int k = 1; k <= store.K; ++k)
      header.push_back("density." + std::to_string(k));
    CsvWriter w(header);
    for (int j = 0; j < grid.size(); ++j) {
      std::vector<double> row = {grid[j]};
      for (int k = 0; k < store.K; ++k) row.push_back(dens(j, k));
      w.add_row(row);
    }
    w.write(dir + "/angle_density.csv");
    result.files.push_back("angle_density.csv");
  }

  // Posterior predictive step-length densities.
  {
    double r_max = cfg.report.r_max;
    if (r_max <= 0.0) {
      for (const MixtureParams& mix : store.mixture)
        for (int k = 0; k < store.K; ++k) {
          const Mat2& cv = mix.omega_cov[k];
          const double half_tr = 0.5 * (cv(0, 0) + cv(1, 1));
          const double disc = std::max(
              0.0, half_tr * half_tr - cv.determinant());
          const double lam = half_tr + std::sqrt(disc);
          r_max = std::max(r_max,
                           mix.xi[k].norm() + 4.0 * std::sqrt(lam));
        }
    }
    Vector grid(cfg.report.r_points);
    for (int j = 0; j < cfg.report.r_points; ++j)
      grid[j] = r_max * j / (cfg.report.r_points - 1);
    const Matrix dens =
        step_density(store, grid, cfg.report.mc_draws,
                     derive_seed(cfg.chain.seed, 9001));
    std::vector<std::string> header = {"r"};
    for (int k = 1; k <= store.K; ++k)
      header.push_back("density." + std::to_string(k));
    CsvWriter w(header);
    for (int j = 0; j < grid.size(); ++j) {
      std::vector<double> row = {grid[j]};
      for (int k = 0; k < store.K; ++k) row.push_back(dens(j, k));
      w.add_row(row);
    }
    w.write(dir + "/step_density.csv");
    result.files.push_back("step_density.csv");
  }

  // Normalized log-ratio correlation curves per category pair.
  {
    const LogRatioReport rep =
        logratio_report(store, report_lags(cfg.report), cfg.report.lower,
                        cfg.report.upper);
    CsvWriter w({"cat_i", "cat_k", "lag", "mean", "lower", "upper"});
    for (std::size_t pi = 0; pi < rep.pairs.size(); ++pi)
      for (std::size_t l = 0; l < rep.lags.size(); ++l)
        w.add_row({static_cast<double>(rep.pairs[pi].first + 1),
                   static_cast<double>(rep.pairs[pi].second + 1),
                   rep.lags[l], rep.curves[pi](l, 0), rep.curves[pi](l, 1),
                   rep.curves[pi](l, 2)});
    w.write(dir + "/logratio.csv");
    result.files.push_back("logratio.csv");
  }
  return result;
}

}  // namespace

std::string file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path + " for checksum");
  std::uint64_t hash = 14695981039346656037ULL;
  char buf[65536];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 1099511628211ULL;
    }
    if (!in) break;
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(hash));
  return std::string(hex);
}

Matrix build_design(const DesignSpec& design, const Vector& times) {
  const int n = static_cast<int>(times.size());
  if (design.type == "linear_time") {
    // Intercept plus time scaled by the final timestamp, so the covariate
    // lies in (0, 1] regardless of the series length.
    Matrix X(n, 2);
    X.col(0).setOnes();
    const double scale = times[n - 1] > 0.0 ? times[n - 1] : 1.0;
    X.col(1) = times / scale;
    return X;
  }
  if (design.type == "windows") {
    const std::vector<double>& breaks = design.window_breaks;
    if (breaks.empty())
      throw ValidationError("windows design needs at least one break");
    for (std::size_t i = 1; i < breaks.size(); ++i)
      if (!(breaks[i] > breaks[i - 1]))
        throw ValidationError("window breaks must be strictly increasing");
    // Intercept plus a dummy per window except the last.
    const int W = static_cast<int>(breaks.size()) + 1;
    Matrix X = Matrix::Zero(n, W);
    X.col(0).setOnes();
    for (int i = 0; i < n; ++i) {
      int w = 0;
      while (w < W - 1 && times[i] >= breaks[w]) ++w;
      if (w < W - 1) X(i, 1 + w) = 1.0;
    }
    return X;
  }
  if (design.type == "csv") {
    if (design.path.empty())
      throw ValidationError("csv design needs a path");
    const CsvTable table = read_csv(design.path);
    if (static_cast<int>(table.rows.size()) != n)
      throw ValidationError("design file has " +
                            std::to_string(table.rows.size()) +
                            " rows; expected " + std::to_string(n));
    const std::size_t idx_col = table.column("index");
    std::vector<std::size_t> cov_cols;
    for (std::size_t c = 0; c < table.header.size(); ++c)
      if (c != idx_col) cov_cols.push_back(c);
    if (cov_cols.empty())
      throw ValidationError("design file has no covariate columns");
    Matrix X(n, cov_cols.size());
    for (int i = 0; i < n; ++i) {
      const int line = i + 2;
      const double idx =
          parse_cell(table.rows[i][idx_col], "design index", line);
      if (idx != i)
        throw ValidationError("design file index mismatch at line " +
                              std::to_string(line));
      for (std::size_t c = 0; c < cov_cols.size(); ++c) {
        X(i, static_cast<int>(c)) =
            parse_cell(table.rows[i][cov_cols[c]], "design value", line);
        if (!std::isfinite(X(i, static_cast<int>(c))))
          throw ValidationError("design value missing at line " +
                                std::to_string(line));
      }
    }
    return X;
  }
  throw ValidationError("unknown design type: " + design.type);
}

ModelData load_model_data(const RunConfig& cfg) {
  const std::string& format = cfg.data.format;
  ModelData data;

  if (format == "grid") {
    const CsvTable table = read_csv(cfg.data.path);
    const std::size_t ci = table.column("index");
    const std::size_t ct = table.column("time");
    const std::size_t cx = table.column("x");
    const std::size_t cy = table.column("y");
    const std::size_t co = table.column("observed");
    const int total = static_cast<int>(table.rows.size());
    if (total < 3)
      throw ValidationError("grid data needs at least 3 rows");
    Matrix coords = Matrix::Constant(total, 2, kNaN);
    std::vector<bool> observed(total, false);
    Vector grid_times(total);
    for (int r = 0; r < total; ++r) {
      const int line = r + 2;
      const auto& row = table.rows[r];
      const double idx = parse_cell(row[ci], "index", line);
      if (idx != r)
        throw ValidationError("grid index mismatch at line " +
                              std::to_string(line));
      grid_times[r] = parse_cell(row[ct], "time", line);
      if (!std::isfinite(grid_times[r]))
        throw ValidationError("missing time at line " + std::to_string(line));
      observed[r] = parse_flag(row[co], "observed", line);
      if (observed[r]) {
        coords(r, 0) = parse_cell(row[cx], "x", line);
        coords(r, 1) = parse_cell(row[cy], "y", line);
        if (!coords.row(r).allFinite())
          throw ValidationError("observed row missing coordinates at line " +
                                std::to_string(line));
      }
    }
    const Vector times = grid_times.segment(2, total - 2);
    data = data_from_grid(std::move(coords), std::move(observed), times);
  } else if (format == "increments") {
    const CsvTable table = read_csv(cfg.data.path);
    const std::size_t ci = table.column("index");
    const std::size_t ct = table.column("time");
    const std::size_t c1 = table.column("y1");
    const std::size_t c2 = table.column("y2");
    const std::size_t co = table.column("observed");
    const int n = static_cast<int>(table.rows.size());
    if (n < 1) throw ValidationError("increment data is empty");
    data.times.resize(n);
    data.y = Matrix::Constant(n, 2, kNaN);
    data.y_observed.assign(n, false);
    for (int r = 0; r < n; ++r) {
      const int line = r + 2;
      const auto& row = table.rows[r];
      const double idx = parse_cell(row[ci], "index", line);
      if (idx != r)
        throw ValidationError("increment index mismatch at line " +
                              std::to_string(line));
      data.times[r] = parse_cell(row[ct], "time", line);
      if (!std::isfinite(data.times[r]))
        throw ValidationError("missing time at line " + std::to_string(line));
      data.y_observed[r] = parse_flag(row[co], "observed", line);
      if (data.y_observed[r]) {
        data.y(r, 0) = parse_cell(row[c1], "y1", line);
        data.y(r, 1) = parse_cell(row[c2], "y2", line);
        if (!data.y.row(r).allFinite())
          throw ValidationError("observed increment missing values at line " +
                                std::to_string(line));
      }
    }
  } else if (format == "raw_track") {
    const RawTrack track = parse_track(cfg.data.path);
    const std::int64_t t0 = cfg.data.t0.empty()
                                ? track.records.front().time
                                : parse_timestamp(cfg.data.t0);
    const RegularizeResult reg =
        regularize(track, t0, cfg.data.step_seconds,
                   cfg.data.snap_tol_seconds);
    const int total = reg.grid.size();
    if (total < 3)
      throw ValidationError("regularized track has fewer than 3 grid points");
    if (!(cfg.data.time_unit_seconds > 0.0))
      throw ValidationError("time_unit_seconds must be positive");
    Vector times(total - 2);
    for (int i = 0; i < total - 2; ++i)
      times[i] = static_cast<double>((i + 2) * cfg.data.step_seconds) /
                 cfg.data.time_unit_seconds;
    data = data_from_grid(reg.grid.coords, reg.grid.observed, times);
  } else {
    throw ValidationError("unknown data format: " + format);
  }

  data.X = build_design(cfg.design, data.times);
  data.validate();
  return data;
}

void cmd_simulate(const RunConfig& cfg, bool force) {
  SimScenario sc = cfg.sim;
  sc.validate();
  const std::string dir = cfg.out;
  ensure_dir(dir);
  const std::string data_path = dir + "/data.csv";
  const std::string truth_path = dir + "/truth.json";
  gate_output(data_path, force);
  gate_output(truth_path, force);

  const SimResult sim = simulate_dataset(sc, cfg.chain.seed);
  const double lag = sc.time_span / sc.T;

  CsvWriter w({"index", "time", "x", "y", "observed", "y1", "y2",
               "step_length", "turning_angle", "y_observed"});
  for (int j = 0; j < sc.T + 2; ++j) {
    std::vector<std::string> row;
    row.push_back(std::to_string(j));
    row.push_back(format_double((j - 1) * lag));
    row.push_back(format_double(sim.coords(j, 0)));
    row.push_back(format_double(sim.coords(j, 1)));
    row.push_back("1");
    if (j >= 2) {
      const int i = j - 2;
      const double y1 = sim.y(i, 0), y2 = sim.y(i, 1);
      row.push_back(format_double(y1));
      row.push_back(format_double(y2));
      row.push_back(format_double(std::sqrt(y1 * y1 + y2 * y2)));
      row.push_back(format_double(wrap_angle(std::atan2(y2, y1))));
      row.push_back("1");
    } else {
      row.insert(row.end(), {"", "", "", "", ""});
    }
    w.add_row(std::move(row));
  }
  w.write(data_path);

  json truth;
  truth["K"] = sc.K();
  truth["T"] = sc.T;
  truth["time_span"] = sc.time_span;
  truth["seed"] = cfg.chain.seed;
  truth["beta"] = json::parse(config_to_json_text(cfg))["sim"]["beta"];
  {
    json sig = json::array();
    for (int i = 0; i < sc.gp.sigma_star.rows(); ++i) {
      json row = json::array();
      for (int j = 0; j < sc.gp.sigma_star.cols(); ++j)
        row.push_back(sc.gp.sigma_star(i, j));
      sig.push_back(row);
    }
    truth["sigma_star"] = sig;
    json dec = json::array();
    for (int k = 0; k < sc.gp.decays.size(); ++k)
      dec.push_back(sc.gp.decays[k]);
    truth["decays"] = dec;
    json xi = json::array();
    for (const Vec2& v : sc.mixture.xi) xi.push_back(json{v[0], v[1]});
    truth["xi"] = xi;
    json oc = json::array();
    for (const Mat2& m : sc.mixture.omega_cov)
      oc.push_back(json{{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}});
    truth["omega_cov"] = oc;
  }
  truth["z"] = sim.z;
  {
    json pi = json::array();
    for (int t = 0; t < sc.T; ++t) {
      json row = json::array();
      for (int k = 0; k < sc.K(); ++k) row.push_back(sim.pi(t, k));
      pi.push_back(row);
    }
    truth["pi"] = pi;
    json om = json::array();
    for (int t = 0; t < sc.T; ++t) {
      json row = json::array();
      for (int k = 0; k < sc.K() - 1; ++k) row.push_back(sim.omega(t, k));
      om.push_back(row);
    }
    truth["omega"] = om;
    json times = json::array();
    for (int t = 0; t < sc.T; ++t) times.push_back(sim.times[t]);
    truth["times"] = times;
  }
  write_json_file(truth_path, truth);
}

void cmd_fit(const RunConfig& cfg, bool force) {
  cfg.validate_common();
  if (cfg.data.path.empty())
    throw ValidationError("fit requires data.path");
  ensure_dir(cfg.out);

  const double t0 = now_seconds();
  const ModelData data = load_model_data(cfg);
  const double t_load = now_seconds();
  FitResult fit = run_fit_cell(cfg, data, cfg.out, force, true);
  const double t_done = now_seconds();

  json manifest = store_manifest(cfg, fit.store, fit.icl, "fit");
  json files;
  for (const std::string& f : fit.files)
    files[f] = file_checksum(cfg.out + "/" + f);
  manifest["files"] = files;
  write_json_file(cfg.out + "/manifest.json", manifest);

  json timing;
  timing["load_seconds"] = t_load - t0;
  timing["run_and_report_seconds"] = t_done - t_load;
  timing["total_seconds"] = t_done - t0;
  timing["iters"] = cfg.chain.iters;
  timing["retained"] = fit.store.size();
  const double per1000 = fit.store.size()
                             ? (t_done - t_load) / fit.store.size() * 1000.0
                             : 0.0;
  timing["seconds_per_1000_retained"] = per1000;
  write_json_file(cfg.out + "/timing.json", timing);
}

void cmd_select(const RunConfig& cfg, bool force) {
  cfg.validate_common();
  if (cfg.select.K_list.empty() || cfg.select.m_list.empty())
    throw ValidationError("select requires nonempty K_list and m_list");
  if (cfg.data.path.empty())
    throw ValidationError("select requires data.path");
  ensure_dir(cfg.out);
  const std::string table_path = cfg.out + "/icl_table.csv";
  gate_output(table_path, force);

  const ModelData data = load_model_data(cfg);

  struct Cell {
    int K, m;
    bool ok = false;
    double printed = 0.0;
    std::string message;
  };
  std::vector<Cell> cells;
  int cell_index = 0;
  for (int K : cfg.select.K_list)
    for (int m : cfg.select.m_list) {
      Cell cell;
      cell.K = K;
      cell.m = m;
      RunConfig sub = cfg;
      sub.chain.K = K;
      sub.chain.m = m;
      sub.chain.seed = derive_seed(cfg.chain.seed, 1000 + cell_index);
      sub.out = cfg.out + "/cell_K" + std::to_string(K) + "_m" +
                std::to_string(m);
      try {
        sub.chain.validate();
        sub.priors.validate(K);
        ensure_dir(sub.out);
        FitResult fit = run_fit_cell(sub, data, sub.out, force, false);
        json manifest = store_manifest(sub, fit.store, fit.icl, "select");
        json files;
        for (const std::string& f : fit.files)
          files[f] = file_checksum(sub.out + "/" + f);
        manifest["files"] = files;
        write_json_file(sub.out + "/manifest.json", manifest);
        cell.ok = true;
        cell.printed = fit.icl.printed;
      } catch (const Error& e) {
        cell.message = e.what();
        std::replace(cell.message.begin(), cell.message.end(), ',', ';');
        std::replace(cell.message.begin(), cell.message.end(), '\n', ' ');
      }
      cells.push_back(cell);
      ++cell_index;
    }

  int best = -1;
  for (std::size_t i = 0; i < cells.size(); ++i)
    if (cells[i].ok &&
        (best < 0 || cells[i].printed < cells[best].printed))
      best = static_cast<int>(i);

  CsvWriter w({"K", "m", "icl", "selected", "status"});
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Cell& c = cells[i];
    w.add_row({std::to_string(c.K), std::to_string(c.m),
               c.ok ? format_double(c.printed) : "",
               static_cast<int>(i) == best ? "1" : "0",
               c.ok ? "ok" : "error: " + c.message});
  }
  w.write(table_path);

  json manifest;
  manifest["command"] = "select";
  manifest["config"] = config_json(cfg);
  manifest["cells"] = json::array();
  for (const Cell& c : cells) {
    json jc;
    jc["K"] = c.K;
    jc["m"] = c.m;
    jc["ok"] = c.ok;
    if (c.ok)
      jc["icl_printed"] = c.printed;
    else
      jc["error"] = c.message;
    manifest["cells"].push_back(jc);
  }
  if (best >= 0) {
    manifest["selected_K"] = cells[best].K;
    manifest["selected_m"] = cells[best].m;
  }
  manifest["files"] = json{{"icl_table.csv", file_checksum(table_path)}};
  write_json_file(cfg.out + "/manifest.json", manifest);
}

void cmd_summarize(const RunConfig& cfg) {
  const std::string dir = cfg.out;
  if (!fs::exists(dir + "/manifest.json"))
    throw ValidationError("no manifest.json in " + dir);
  const CsvTable table = read_csv(dir + "/samples.csv");
  const std::size_t ncol = table.header.size();
  const std::size_t nrow = table.rows.size();
  if (nrow == 0) throw ValidationError("samples.csv has no draws");

  std::printf("%-16s %15s %15s %15s\n", "parameter", "mean", "q2.5", "q97.5");
  std::vector<double> col(nrow);
  for (std::size_t c = 0; c < ncol; ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < nrow; ++r) {
      col[r] = parse_cell(table.rows[r][c], "sample value",
                          static_cast<int>(r) + 2);
      sum += col[r];
    }
    std::sort(col.begin(), col.end());
    const double mean = sum / static_cast<double>(nrow);
    auto q = [&](double p) {
      const double h = p * (static_cast<double>(nrow) - 1.0);
      const std::size_t lo = static_cast<std::size_t>(h);
      if (lo + 1 >= nrow) return col.back();
      return col[lo] + (h - lo) * (col[lo + 1] - col[lo]);
    };
    std::printf("%-16s %15.6g %15.6g %15.6g\n", table.header[c].c_str(),
                mean, q(0.025), q(0.975));
  }
}

}  // namespace lngp
