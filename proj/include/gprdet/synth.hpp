#pragma once

#include "gprdet/core.hpp"

#include <cstdint>
#include <vector>

namespace gprdet {

// Synthetic lane generator configuration. Geometry defaults mirror a 448
// sample, 13-lane desk-scale dataset; the difficulty knobs (noise, clutter
// amplitude, echo structure) are what the ablation experiments lean on.
struct SynthConfig {
  // dataset geometry
  int n_lanes = 13;
  double lane_length_m = 25.0;
  double lane_width_m = 1.5;
  double dx_down_m = 0.05;
  double dx_cross_m = 0.05;
  int n_time = 448;
  double dt_ns = 0.1;

  // objects
  int n_threats = 6;
  int n_clutter = 6;
  double depth_min_m = 0.15;
  double depth_max_m = 0.50;
  double min_object_separation_m = 1.2;
  double placement_margin_m = 0.8;

  // wave propagation
  double velocity_m_per_ns = 0.1;
  double pulse_sigma_ns = 0.4;
  double ground_time_ns = 10.0;
  int ground_jitter_samples = 3;
  double ground_amplitude = 4.0;
  double amplitude_decay_exponent = 0.5;
  double beam_sigma_m = 0.2;

  // per-class reflectivity; threats ring (multiple echoes), clutter is
  // weaker and more irregular
  double threat_amp_min = 1.6;
  double threat_amp_max = 2.4;
  double clutter_amp_min = 0.9;
  double clutter_amp_max = 1.6;
  int threat_echoes = 3;
  int clutter_echoes_max = 2;
  double echo_spacing_ns = 1.8;
  double echo_decay = 0.55;

  double noise_sigma = 0.15;
  std::uint64_t seed = 0;

  void validate() const;
};

// First derivative of a Gaussian: -t * exp(-t^2 / (2 sigma^2)).
double pulse(double t_ns, double sigma_ns);

struct ScatterResponse {
  double two_way_time_ns = 0.0;
  double amplitude_scale = 0.0;
};

// Arrival time and geometric amplitude factor of a point scatterer at
// `depth_m` below `target_pos_m`, observed from the antenna at `ascan_pos_m`
// (both ground-plane positions in meters).
ScatterResponse scatter_response(double depth_m, double target_down_m, double target_cross_m,
                                 double ascan_down_m, double ascan_cross_m,
                                 const SynthConfig& config);

// Generates one lane: ground reflection with per-A-scan jitter, buried
// point scatterers (threats and clutter) and i.i.d. Gaussian noise.
// Deterministic given (config, lane_id); the lane stream is derived from
// config.seed and lane_id, so lanes can be generated in any order or in
// parallel without changing the output. Amplitudes are quantized to f32 so
// the in-memory volume matches its on-disk representation exactly.
LaneData generate_lane(const SynthConfig& config, int lane_id);

std::vector<LaneData> generate_lanes(const SynthConfig& config, int jobs = 1);

}  // namespace gprdet
