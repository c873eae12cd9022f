#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lngp/common.hpp"

namespace lngp {

// A single GPS fix: epoch seconds plus planar coordinates. Coordinates are
// assumed already projected to a planar metric system; no geodetic
// transforms happen anywhere in this library.
struct TrackRecord {
  std::int64_t time = 0;
  double x = 0.0;
  double y = 0.0;
};

// Raw fixes sorted by time. Valid tracks have strictly increasing
// timestamps and at least three records (the minimum needed to define one
// turning angle).
struct RawTrack {
  std::vector<TrackRecord> records;

  void validate() const;  // throws ValidationError on violation
};

enum class TrackFormat { csv };

// A track resampled onto a fixed-step grid. Index i is the instant
// t0 + i*step; unobserved slots carry NaN coordinates and observed[i]==false.
struct TrackGrid {
  std::int64_t t0 = 0;
  std::int64_t step = 1800;  // seconds; 30-minute default
  Matrix coords;             // T x 2
  std::vector<bool> observed;

  int size() const { return static_cast<int>(coords.rows()); }
  void validate() const;  // throws Error on inconsistent fields
};

// Result of snapping raw records onto a grid.
struct RegularizeResult {
  TrackGrid grid;
  int dropped = 0;  // records that fell outside every snap window
};

// Rotated increments of a grid track. With displacements
// d_i = s_{i+1} - s_i, the heading of d_i is bearings[i] and
// y[i] = R(bearings[i])^{-1} d_{i+1}, i.e. each displacement expressed in
// the frame of the previous heading. A grid of T points yields T-1
// bearings and T-2 increments; entries needing an unobserved coordinate
// are missing.
struct Increments {
  Matrix y;              // (T-2) x 2, NaN rows when missing
  Vector bearings;       // (T-1), wrapped to [0, 2*pi), NaN when missing
  std::vector<bool> y_observed;
  std::vector<bool> bearing_observed;

  int size() const { return static_cast<int>(y.rows()); }
  double step_length(int i) const;    // ||y[i]||
  double turning_angle(int i) const;  // atan2(y[i].y, y[i].x) in [0, 2*pi)
};

// Read fixes from a CSV file with header `timestamp,x,y` and ISO-8601
// timestamps. Rows are sorted by time; malformed rows and duplicate
// timestamps raise ValidationError with the offending line number.
RawTrack parse_track(const std::string& path,
                     TrackFormat format = TrackFormat::csv);

// Snap each record to its nearest grid index (round((t - t0)/step)) when
// within snap_tol seconds of that grid instant. The grid runs from t0 to
// the last snapped record. Two records landing on one index is an error;
// records outside every window are dropped and counted.
RegularizeResult regularize(const RawTrack& track, std::int64_t t0,
                            std::int64_t step, std::int64_t snap_tol = 60);

// Counterclockwise rotation by `bearing` radians.
Mat2 rotation_matrix(double bearing);

// Wrap an angle into [0, 2*pi).
double wrap_angle(double angle);

// Coordinates -> rotated increments.
Increments decompose(const TrackGrid& grid);

// Increments -> coordinates given the first two positions. The heading of
// s2 - s1 seeds the recursion s_{i+2} = s_{i+1} + R(bearing_i) y_i.
// Throws Error on any missing increment.
Matrix reconstruct(const Vec2& s1, const Vec2& s2, const Increments& incr);

// Export increments as CSV with columns
// `grid_index,y1,y2,step_length,turning_angle,observed`.
void write_increments_csv(const Increments& incr, const std::string& path);

}  // namespace lngp
