#include "lngp/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lngp/csv.hpp"
#include "lngp/timeutil.hpp"

namespace lngp {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kTwoPi = 6.283185307179586476925286766559;
}  // namespace

void RawTrack::validate() const {
  if (records.size() < 3)
    throw ValidationError("track needs at least 3 records, got " +
                          std::to_string(records.size()));
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].time <= records[i - 1].time)
      throw ValidationError("track timestamps must be strictly increasing (" +
                            format_timestamp(records[i].time) +
                            " follows " +
                            format_timestamp(records[i - 1].time) + ")");
  }
}

void TrackGrid::validate() const {
  if (step <= 0) throw Error("grid step must be positive");
  if (coords.rows() < 3)
    throw Error("grid needs at least 3 slots, got " +
                std::to_string(coords.rows()));
  if (coords.cols() != 2) throw Error("grid coords must have 2 columns");
  if (static_cast<int>(observed.size()) != size())
    throw Error("grid observed mask length does not match coords");
  for (int i = 0; i < size(); ++i) {
    const bool finite =
        std::isfinite(coords(i, 0)) && std::isfinite(coords(i, 1));
    if (finite != observed[i])
      throw Error("grid slot " + std::to_string(i) +
                  ": observed flag disagrees with coordinates");
  }
}

double Increments::step_length(int i) const {
  if (!y_observed[i]) return kNaN;
  return y.row(i).norm();
}

double Increments::turning_angle(int i) const {
  if (!y_observed[i]) return kNaN;
  return wrap_angle(std::atan2(y(i, 1), y(i, 0)));
}

RawTrack parse_track(const std::string& path, TrackFormat format) {
  if (format != TrackFormat::csv)
    throw ValidationError("unsupported track format");
  CsvTable table = read_csv(path);
  const std::size_t c_time = table.column("timestamp");
  const std::size_t c_x = table.column("x");
  const std::size_t c_y = table.column("y");
  RawTrack track;
  track.records.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = " (line " + std::to_string(r + 2) + " of " +
                              path + ")";
    TrackRecord rec;
    try {
      rec.time = parse_timestamp(row[c_time]);
    } catch (const ValidationError& e) {
      throw ValidationError(std::string(e.what()) + where);
    }
    char* end = nullptr;
    rec.x = std::strtod(row[c_x].c_str(), &end);
    if (end == row[c_x].c_str() || *end != '\0' || !std::isfinite(rec.x))
      throw ValidationError("unparseable x value '" + row[c_x] + "'" + where);
    rec.y = std::strtod(row[c_y].c_str(), &end);
    if (end == row[c_y].c_str() || *end != '\0' || !std::isfinite(rec.y))
      throw ValidationError("unparseable y value '" + row[c_y] + "'" + where);
    track.records.push_back(rec);
  }
  std::stable_sort(track.records.begin(), track.records.end(),
                   [](const TrackRecord& a, const TrackRecord& b) {
                     return a.time < b.time;
                   });
  for (std::size_t i = 1; i < track.records.size(); ++i)
    if (track.records[i].time == track.records[i - 1].time)
      throw ValidationError("duplicate timestamp " +
                            format_timestamp(track.records[i].time) + " in " +
                            path);
  track.validate();
  return track;
}

RegularizeResult regularize(const RawTrack& track, std::int64_t t0,
                            std::int64_t step, std::int64_t snap_tol) {
  if (step <= 0) throw ValidationError("grid step must be positive");
  if (snap_tol < 0 || 2 * snap_tol >= step)
    throw ValidationError("snap tolerance must lie in [0, step/2)");
  track.validate();

  // First pass: assign each record to its nearest grid index.
  std::vector<std::pair<std::int64_t, const TrackRecord*>> snapped;
  int dropped = 0;
  for (const TrackRecord& rec : track.records) {
    const std::int64_t offset = rec.time - t0;
    // Round to nearest index, correctly for negative offsets.
    std::int64_t idx = (offset >= 0) ? (offset + step / 2) / step
                                     : -((-offset + step / 2) / step);
    const std::int64_t gap = rec.time - (t0 + idx * step);
    if (idx < 0 || gap > snap_tol || gap < -snap_tol) {
      ++dropped;
      continue;
    }
    snapped.emplace_back(idx, &rec);
  }
  if (snapped.size() < 3)
    throw ValidationError(
        "fewer than 3 records remain on the grid after snapping");
  for (std::size_t i = 1; i < snapped.size(); ++i)
    if (snapped[i].first == snapped[i - 1].first)
      throw ValidationError("two records snap to grid index " +
                            std::to_string(snapped[i].first));

  const std::int64_t last = snapped.back().first;
  const int T = static_cast<int>(last) + 1;
  RegularizeResult out;
  out.dropped = dropped;
  out.grid.t0 = t0;
  out.grid.step = step;
  out.grid.coords = Matrix::Constant(T, 2, kNaN);
  out.grid.observed.assign(T, false);
  for (const auto& [idx, rec] : snapped) {
    out.grid.coords(idx, 0) = rec->x;
    out.grid.coords(idx, 1) = rec->y;
    out.grid.observed[idx] = true;
  }
  out.grid.validate();
  return out;
}

Mat2 rotation_matrix(double bearing) {
  const double c = std::cos(bearing);
  const double s = std::sin(bearing);
  Mat2 r;
  r << c, -s, s, c;
  return r;
}

double wrap_angle(double angle) {
  double a = std::fmod(angle, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return a;
}

Increments decompose(const TrackGrid& grid) {
  grid.validate();
  const int T = grid.size();
  Increments incr;
  incr.bearings = Vector::Constant(T - 1, kNaN);
  incr.bearing_observed.assign(T - 1, false);
  incr.y = Matrix::Constant(T - 2, 2, kNaN);
  incr.y_observed.assign(T - 2, false);

  for (int i = 0; i + 1 < T; ++i) {
    if (!grid.observed[i] || !grid.observed[i + 1]) continue;
    const double dx = grid.coords(i + 1, 0) - grid.coords(i, 0);
    const double dy = grid.coords(i + 1, 1) - grid.coords(i, 1);
    incr.bearings[i] = wrap_angle(std::atan2(dy, dx));
    incr.bearing_observed[i] = true;
  }
  for (int i = 0; i + 2 < T; ++i) {
    if (!incr.bearing_observed[i] || !grid.observed[i + 2]) continue;
    const Vec2 d(grid.coords(i + 2, 0) - grid.coords(i + 1, 0),
                 grid.coords(i + 2, 1) - grid.coords(i + 1, 1));
    incr.y.row(i) = (rotation_matrix(incr.bearings[i]).transpose() * d)
                        .transpose();
    incr.y_observed[i] = true;
  }
  return incr;
}

Matrix reconstruct(const Vec2& s1, const Vec2& s2, const Increments& incr) {
  const int n = incr.size();
  for (int i = 0; i < n; ++i)
    if (!incr.y_observed[i])
      throw Error("cannot reconstruct through missing increment " +
                  std::to_string(i));
  Matrix coords(n + 2, 2);
  coords.row(0) = s1.transpose();
  coords.row(1) = s2.transpose();
  double bearing = std::atan2(s2.y() - s1.y(), s2.x() - s1.x());
  Vec2 prev = s2;
  for (int i = 0; i < n; ++i) {
    const Vec2 d = rotation_matrix(bearing) * incr.y.row(i).transpose();
    const Vec2 next = prev + d;
    coords.row(i + 2) = next.transpose();
    bearing = std::atan2(d.y(), d.x());
    prev = next;
  }
  return coords;
}

void write_increments_csv(const Increments& incr, const std::string& path) {
  CsvWriter writer(
      {"grid_index", "y1", "y2", "step_length", "turning_angle", "observed"});
  for (int i = 0; i < incr.size(); ++i) {
    if (incr.y_observed[i]) {
      writer.add_row({std::to_string(i), format_double(incr.y(i, 0)),
                      format_double(incr.y(i, 1)),
                      format_double(incr.step_length(i)),
                      format_double(incr.turning_angle(i)), "1"});
    } else {
      writer.add_row({std::to_string(i), "", "", "", "", "0"});
    }
  }
  writer.write(path);
}

}  // namespace lngp
