#pragma once

#include <string>
#include <vector>

#include "lngp/evaluation.hpp"
#include "lngp/model.hpp"

namespace lngp {

// Where the data comes from and how to interpret it.
//
// format "grid": CSV with columns index,time,x,y,observed — one row per
//   grid position; increments are derived internally.
// format "increments": CSV with columns index,time,y1,y2,observed — one
//   row per increment, no coordinate backing (missing rows are
//   marginalized rather than imputed).
// format "raw_track": CSV with columns timestamp,x,y of irregular fixes;
//   they are snapped to a fixed grid first.
struct DataSpec {
  std::string path;
  std::string format = "grid";
  std::string t0;                      // raw_track grid origin; empty =
                                       // first fix's timestamp
  long long step_seconds = 1800;       // raw_track grid step
  long long snap_tol_seconds = 60;     // raw_track snap window
  double time_unit_seconds = 86400.0;  // seconds per model time unit
};

// Covariate design for the latent mean.
//
// "linear_time": columns (1, t).
// "windows": an intercept plus one dummy per window except the last;
//   window w covers times in [breaks[w-1], breaks[w]) with breaks
//   augmented by -inf/+inf at the ends.
// "csv": arbitrary design read from a file with columns index,x1,x2,...
struct DesignSpec {
  std::string type = "linear_time";
  std::vector<double> window_breaks;
  std::string path;
};

// Model-selection sweep.
struct SelectSpec {
  std::vector<int> K_list = {2, 3, 4};
  std::vector<int> m_list = {1, 10, 20};
};

// Posterior report settings.
struct ReportSpec {
  double lower = 0.025;
  double upper = 0.975;
  int mc_draws = 20000;     // step-length predictive pool per component
  int theta_points = 720;   // turning-angle grid size over [0, 2*pi)
  int r_points = 256;       // step-length grid size
  double r_max = 0.0;       // 0 = derive from the posterior draws
  std::vector<double> lags; // empty = 41 evenly spaced lags on [0, 2]
};

// Everything one command needs. JSON (de)serialization is partial on
// read (absent keys keep their defaults) and total on write, and the
// write-then-read round trip is lossless.
struct RunConfig {
  ChainConfig chain;
  Priors priors;
  DataSpec data;
  DesignSpec design;
  SimScenario sim = SimScenario::defaults();
  SelectSpec select;
  ReportSpec report;
  std::string out = "run";

  void validate_common() const;  // chain + priors + report invariants
};

RunConfig config_from_json_text(const std::string& text);
RunConfig config_from_file(const std::string& path);
std::string config_to_json_text(const RunConfig& cfg);

std::vector<double> report_lags(const ReportSpec& rep);

}  // namespace lngp
