#include "gprdet/synth.hpp"

#include "gprdet/parallel.hpp"
#include "gprdet/rng.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace gprdet {

namespace {

// sub-stream indices within one lane's seed
enum : std::uint64_t { kPlacementStream = 1, kJitterStream = 2, kNoiseStream = 3 };

struct Scatterer {
  double down_m = 0.0;
  double cross_m = 0.0;
  double depth_m = 0.0;
  double amplitude = 0.0;
  int echoes = 1;
  bool is_threat = false;
};

}  // namespace

void SynthConfig::validate() const {
  auto pos = [](double x) { return std::isfinite(x) && x > 0.0; };
  if (n_lanes < 1) throw Error("synth: n_lanes must be >= 1");
  if (!pos(lane_length_m) || !pos(lane_width_m))
    throw Error("synth: lane dimensions must be > 0");
  if (!pos(dx_down_m) || !pos(dx_cross_m) || !pos(dt_ns))
    throw Error("synth: sample spacings must be > 0");
  if (n_time < 8) throw Error("synth: n_time must be >= 8");
  if (n_threats < 0 || n_clutter < 0) throw Error("synth: object counts must be >= 0");
  if (!pos(velocity_m_per_ns)) throw Error("synth: velocity_m_per_ns must be > 0");
  if (!pos(beam_sigma_m)) throw Error("synth: beam_sigma_m must be > 0");
  if (!pos(pulse_sigma_ns)) throw Error("synth: pulse_sigma_ns must be > 0");
  if (depth_min_m < 0.0 || depth_max_m < depth_min_m)
    throw Error("synth: depth range invalid");
  if (ground_jitter_samples < 0) throw Error("synth: ground_jitter_samples must be >= 0");
  if (noise_sigma < 0.0) throw Error("synth: noise_sigma must be >= 0");
  if (threat_echoes < 1 || clutter_echoes_max < 1)
    throw Error("synth: echo counts must be >= 1");
  if (echo_decay < 0.0 || echo_decay > 1.0) throw Error("synth: echo_decay must be in [0,1]");

  // deepest echo of the deepest object must land inside the recorded window
  const double t_last = ground_time_ns + ground_jitter_samples * dt_ns +
                        2.0 * depth_max_m / velocity_m_per_ns +
                        (std::max(threat_echoes, clutter_echoes_max) - 1) * echo_spacing_ns +
                        4.0 * pulse_sigma_ns;
  if (t_last >= n_time * dt_ns)
    throw Error("synth: depth range does not fit the recorded time window (last echo at " +
                std::to_string(t_last) + " ns, window " + std::to_string(n_time * dt_ns) +
                " ns)");

  const int n_objects = n_threats + n_clutter;
  if (n_objects > 0) {
    const double usable = lane_length_m - 2.0 * placement_margin_m;
    if (usable <= 0.0 || usable < (n_objects - 1) * min_object_separation_m)
      throw Error("synth: " + std::to_string(n_objects) + " objects cannot fit " +
                  std::to_string(min_object_separation_m) + " m apart in the " +
                  std::to_string(usable) + " m usable lane length");
  }
}

double pulse(double t_ns, double sigma_ns) {
  const double s2 = sigma_ns * sigma_ns;
  return -t_ns * std::exp(-t_ns * t_ns / (2.0 * s2));
}

ScatterResponse scatter_response(double depth_m, double target_down_m, double target_cross_m,
                                 double ascan_down_m, double ascan_cross_m,
                                 const SynthConfig& config) {
  const double dd = ascan_down_m - target_down_m;
  const double dc = ascan_cross_m - target_cross_m;
  const double range2 = dd * dd + dc * dc;
  const double dist2 = depth_m * depth_m + range2;
  ScatterResponse r;
  r.two_way_time_ns = config.ground_time_ns + 2.0 * std::sqrt(dist2) / config.velocity_m_per_ns;
  r.amplitude_scale = std::pow(dist2, -config.amplitude_decay_exponent / 2.0);
  return r;
}

namespace {

// Adds amp * pulse(t - t0, sigma) to the A-scan, only over the pulse support.
void add_pulse(Eigen::Map<Eigen::ArrayXd> ascan, double t0_ns, double amp,
               const SynthConfig& cfg) {
  const double support = 4.5 * cfg.pulse_sigma_ns;
  const int lo = std::max(0, static_cast<int>(std::floor((t0_ns - support) / cfg.dt_ns)));
  const int hi = std::min(static_cast<int>(ascan.size()) - 1,
                          static_cast<int>(std::ceil((t0_ns + support) / cfg.dt_ns)));
  for (int t = lo; t <= hi; ++t) ascan[t] += amp * pulse(t * cfg.dt_ns - t0_ns, cfg.pulse_sigma_ns);
}

std::vector<Scatterer> place_objects(const SynthConfig& cfg, std::mt19937_64& rng) {
  std::vector<Scatterer> objects;
  std::uniform_real_distribution<double> down_dist(cfg.placement_margin_m,
                                                   cfg.lane_length_m - cfg.placement_margin_m);
  const double cross_margin = std::min(cfg.placement_margin_m, cfg.lane_width_m / 4.0);
  std::uniform_real_distribution<double> cross_dist(cross_margin,
                                                    cfg.lane_width_m - cross_margin);
  std::uniform_real_distribution<double> depth_dist(cfg.depth_min_m, cfg.depth_max_m);
  std::uniform_real_distribution<double> threat_amp(cfg.threat_amp_min, cfg.threat_amp_max);
  std::uniform_real_distribution<double> clutter_amp(cfg.clutter_amp_min, cfg.clutter_amp_max);
  std::uniform_int_distribution<int> clutter_echo_dist(1, cfg.clutter_echoes_max);

  const int total = cfg.n_threats + cfg.n_clutter;
  // sequential rejection can jam at high densities; restart from scratch then
  constexpr int kMaxRestarts = 64;
  constexpr int kRetriesPerObject = 400;
  for (int restart = 0; restart < kMaxRestarts; ++restart) {
    objects.clear();
    bool jammed = false;
    while (static_cast<int>(objects.size()) < total && !jammed) {
      Scatterer s;
      s.is_threat = static_cast<int>(objects.size()) < cfg.n_threats;
      if (s.is_threat) {
        s.amplitude = threat_amp(rng);
        s.echoes = cfg.threat_echoes;
      } else {
        s.amplitude = clutter_amp(rng);
        s.echoes = clutter_echo_dist(rng);
      }
      jammed = true;
      for (int attempt = 0; attempt < kRetriesPerObject; ++attempt) {
        s.down_m = down_dist(rng);
        s.cross_m = cross_dist(rng);
        s.depth_m = depth_dist(rng);
        const bool clear = std::none_of(objects.begin(), objects.end(), [&](const Scatterer& o) {
          return std::hypot(s.down_m - o.down_m, s.cross_m - o.cross_m) <
                 cfg.min_object_separation_m;
        });
        if (clear) {
          objects.push_back(s);
          jammed = false;
          break;
        }
      }
    }
    if (!jammed) return objects;
  }
  throw Error("synth: could not place " + std::to_string(total) + " objects " +
              std::to_string(cfg.min_object_separation_m) + " m apart after " +
              std::to_string(kMaxRestarts) + " placement attempts");
}

}  // namespace

LaneData generate_lane(const SynthConfig& config, int lane_id) {
  config.validate();
  const std::uint64_t lane_seed =
      derive_seed(config.seed, static_cast<std::uint64_t>(lane_id));

  const int n_down = std::max(1, static_cast<int>(std::lround(config.lane_length_m / config.dx_down_m)));
  const int n_cross = std::max(1, static_cast<int>(std::lround(config.lane_width_m / config.dx_cross_m)));

  LaneData lane;
  lane.volume = Volume::zeros(n_down, n_cross, config.n_time, config.dx_down_m,
                              config.dx_cross_m, config.dt_ns);

  auto place_rng = make_rng(lane_seed, kPlacementStream);
  const std::vector<Scatterer> objects = place_objects(config, place_rng);

  auto jitter_rng = make_rng(lane_seed, kJitterStream);
  std::uniform_int_distribution<int> jitter_dist(-config.ground_jitter_samples,
                                                 config.ground_jitter_samples);
  auto noise_rng = make_rng(lane_seed, kNoiseStream);
  std::normal_distribution<double> noise_dist(0.0, 1.0);

  for (int d = 0; d < n_down; ++d) {
    const double pos_down = d * config.dx_down_m;
    for (int c = 0; c < n_cross; ++c) {
      const double pos_cross = c * config.dx_cross_m;
      auto ascan = lane.volume.ascan(d, c);

      // per-A-scan surface jitter shifts the ground and everything below it
      const int jitter = config.ground_jitter_samples > 0 ? jitter_dist(jitter_rng) : 0;
      const double jitter_ns = jitter * config.dt_ns;
      add_pulse(ascan, config.ground_time_ns + jitter_ns, config.ground_amplitude, config);

      for (const auto& obj : objects) {
        const ScatterResponse resp = scatter_response(obj.depth_m, obj.down_m, obj.cross_m,
                                                      pos_down, pos_cross, config);
        // finite antenna beam: taper the response with horizontal offset
        const double r2 = (pos_down - obj.down_m) * (pos_down - obj.down_m) +
                          (pos_cross - obj.cross_m) * (pos_cross - obj.cross_m);
        const double beam = std::exp(-r2 / (2.0 * config.beam_sigma_m * config.beam_sigma_m));
        double amp = obj.amplitude * resp.amplitude_scale * beam;
        for (int e = 0; e < obj.echoes; ++e) {
          add_pulse(ascan, resp.two_way_time_ns + jitter_ns + e * config.echo_spacing_ns, amp,
                    config);
          amp *= config.echo_decay;
        }
      }

      if (config.noise_sigma > 0.0) {
        for (int t = 0; t < config.n_time; ++t)
          ascan[t] += config.noise_sigma * noise_dist(noise_rng);
      }
    }
  }

  // match the on-disk f32 representation bit for bit
  for (double& a : lane.volume.data) a = static_cast<float>(a);

  for (std::size_t i = 0; i < objects.size(); ++i) {
    GroundTruth t;
    t.lane_id = lane_id;
    t.object_id = static_cast<int>(i);
    t.down_m = objects[i].down_m;
    t.cross_m = objects[i].cross_m;
    t.depth_m = objects[i].depth_m;
    t.is_threat = objects[i].is_threat;
    lane.truths.push_back(t);
  }
  return lane;
}

std::vector<LaneData> generate_lanes(const SynthConfig& config, int jobs) {
  std::vector<LaneData> lanes(config.n_lanes);
  parallel_for(config.n_lanes, jobs,
               [&](int i) { lanes[i] = generate_lane(config, i); });
  return lanes;
}

}  // namespace gprdet
