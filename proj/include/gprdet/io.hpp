#pragma once

#include "gprdet/core.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace gprdet {

// Volume container format (".gprv"):
//   magic "GPRV", u16 version (=1),
//   u32 n_down, u32 n_cross, u32 n_time,
//   f64 dx_down_m, f64 dx_cross_m, f64 dt_ns,
//   f32 amplitudes, time index fastest, then cross-track, then down-track.
// All integers and floats little-endian. Amplitudes that are exactly
// representable in f32 round-trip bit-exactly.
void save_volume(const Volume& volume, const std::filesystem::path& path);
Volume load_volume(const std::filesystem::path& path);

// Ground truth CSV: header `lane_id,object_id,down_m,cross_m,depth_m,is_threat`,
// is_threat in {0,1}.
void save_ground_truth_csv(const std::vector<GroundTruth>& truths,
                           const std::filesystem::path& path);
std::vector<GroundTruth> load_ground_truth_csv(const std::filesystem::path& path);

// Scored alarm CSV: `lane_id,down_m,cross_m,label,matched_object,confidence,fold`.
void save_alarms_csv(const std::vector<Alarm>& alarms, const std::filesystem::path& path);

// Writes `content` to `path` atomically: a sibling temp file is written first
// and renamed into place, so no partially written file is ever visible.
void atomic_write(const std::filesystem::path& path, const std::string& content);

// Shortest decimal form that parses back to the same double.
std::string format_double(double x);

}  // namespace gprdet
