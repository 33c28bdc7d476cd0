// Copyright 2026 The sepkit authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sepkit/room.h"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "sepkit/fft.h"
#include "sepkit/metrics.h"
#include "sepkit/util.h"

namespace sepkit {

Eigen::Vector3d ArrayGeometry::MicPosition(int index) const {
  if (index < 0 || index >= mic_count)
    throw std::invalid_argument("array: mic index out of range");
  const double angle = orientation + 2.0 * M_PI * index / mic_count;
  return center + radius() * Eigen::Vector3d(std::cos(angle), std::sin(angle), 0.0);
}

namespace {

bool InsideWithMargin(const RoomSpec& room, const Eigen::Vector3d& p, double margin) {
  return p.x() >= margin && p.x() <= room.length - margin && p.y() >= margin &&
         p.y() <= room.width - margin && p.z() >= margin && p.z() <= room.height - margin;
}

double WrapAngle(double a) {
  a = std::remainder(a, 2.0 * M_PI);
  if (a <= -M_PI) a += 2.0 * M_PI;
  return a;
}

double CircularDeltaDeg(double a, double b) {
  const double d = std::abs(WrapAngle(a - b));
  return d * 180.0 / M_PI;
}

// Distance from p along direction (cos a, sin a) to the margin-inset box.
double RayDistanceToInset(const RoomSpec& room, const Eigen::Vector3d& p, double a,
                          double margin) {
  const double dx = std::cos(a), dy = std::sin(a);
  double dist = std::numeric_limits<double>::infinity();
  if (dx > 1e-12) dist = std::min(dist, (room.length - margin - p.x()) / dx);
  if (dx < -1e-12) dist = std::min(dist, (margin - p.x()) / dx);
  if (dy > 1e-12) dist = std::min(dist, (room.width - margin - p.y()) / dy);
  if (dy < -1e-12) dist = std::min(dist, (margin - p.y()) / dy);
  return dist;
}

}  // namespace

void SceneSpec::Validate() const {
  if (sources.empty()) throw std::invalid_argument("scene: no sources");
  if (sources.size() != azimuths.size())
    throw std::invalid_argument("scene: azimuth count mismatch");
  const double margin = 0.3 - 1e-9;
  for (const auto& s : sources) {
    if (!InsideWithMargin(room, s, margin))
      throw std::invalid_argument("scene: source too close to a wall");
    if (std::abs(s.z() - array.center.z()) > 1e-9)
      throw std::invalid_argument("scene: source not on the array plane");
  }
  for (int m = 0; m < array.mic_count; ++m) {
    if (!InsideWithMargin(room, array.MicPosition(m), margin))
      throw std::invalid_argument("scene: microphone too close to a wall");
  }
}

double MinAngleDeltaDeg(const std::vector<double>& azimuths) {
  double best = 180.0;
  for (size_t i = 0; i < azimuths.size(); ++i)
    for (size_t j = i + 1; j < azimuths.size(); ++j)
      best = std::min(best, CircularDeltaDeg(azimuths[i], azimuths[j]));
  return best;
}

SceneSpec SampleScene(uint64_t seed, int source_count, const SceneRanges& ranges) {
  if (source_count < 1) throw std::invalid_argument("sample_scene: need S >= 1");
  Rng rng(seed);
  // The array keeps src_dist_min of clearance to the source inset box in
  // every direction, so any azimuth admits a radius and no draw is rejected
  // (rejection would skew the bucket proportions).
  const double center_margin = ranges.wall_margin + 0.035 + ranges.src_dist_min;

  const double bucket_edges[kNumAngleBuckets + 1] = {0.0, 15.0, 45.0, 90.0, 180.0};
  const std::vector<double> bucket_weights = {0.16, 0.29, 0.26, 0.29};

  for (int attempt = 0; attempt < 1000; ++attempt) {
    SceneSpec scene;
    scene.seed = seed;
    scene.room.length = rng.Uniform(ranges.room_length_min, ranges.room_length_max);
    scene.room.width = rng.Uniform(ranges.room_width_min, ranges.room_width_max);
    scene.room.height = rng.Uniform(ranges.room_height_min, ranges.room_height_max);
    scene.room.t60 = rng.Uniform(ranges.t60_min, ranges.t60_max);

    scene.array.center.x() =
        rng.Uniform(center_margin, scene.room.length - center_margin);
    scene.array.center.y() =
        rng.Uniform(center_margin, scene.room.width - center_margin);
    scene.array.center.z() =
        rng.Uniform(1.0, std::min(1.8, scene.room.height - ranges.wall_margin));
    scene.array.orientation = rng.Uniform(0.0, 2.0 * M_PI);

    std::vector<double> azimuths(static_cast<size_t>(source_count));
    if (source_count == 2) {
      scene.bucket = rng.Categorical(bucket_weights);
      const double delta_deg = rng.Uniform(bucket_edges[scene.bucket],
                                           bucket_edges[scene.bucket + 1]);
      const double base = rng.Uniform(0.0, 2.0 * M_PI);
      const double sign = rng.Uniform() < 0.5 ? -1.0 : 1.0;
      azimuths[0] = base;
      azimuths[1] = base + sign * delta_deg * M_PI / 180.0;
    } else {
      for (auto& a : azimuths) a = rng.Uniform(0.0, 2.0 * M_PI);
      scene.bucket =
          source_count >= 2 ? AngleBucketFromDelta(MinAngleDeltaDeg(azimuths)) : -1;
    }

    bool ok = true;
    for (int s = 0; s < source_count && ok; ++s) {
      const double az = azimuths[static_cast<size_t>(s)];
      const double reach = RayDistanceToInset(scene.room, scene.array.center, az,
                                              ranges.wall_margin);
      const double r_max = std::min(ranges.src_dist_max, reach);
      if (r_max < ranges.src_dist_min) {
        ok = false;
        break;
      }
      const double r = rng.Uniform(ranges.src_dist_min, r_max);
      Eigen::Vector3d pos = scene.array.center +
                            r * Eigen::Vector3d(std::cos(az), std::sin(az), 0.0);
      scene.sources.push_back(pos);
      scene.azimuths.push_back(WrapAngle(az));
    }
    if (!ok) continue;

    scene.Validate();
    return scene;
  }
  throw std::runtime_error("sample_scene: retry budget exhausted");
}

double DirectionalDecayS60(const RoomSpec& room) {
  // Images along direction u lose one wall reflection per traveled length
  // 1/g(u), g(u) = |ux|/Lx + |uy|/Ly + |uz|/Lz, so the directional energy
  // flux decays as exp(-s g(u)) in s = c ln(1/beta^2) t. The backward
  // integral of the octant average has the closed form
  //   G(s) = sum_k (w_k / g_k) exp(-s g_k).
  // Fitting its -5..-25 dB stretch the same way SchroederT60 does gives
  // the -60 dB point in s, a pure room-shape constant.
  constexpr int kGrid = 24;
  std::vector<double> g, w;
  g.reserve(kGrid * kGrid);
  w.reserve(kGrid * kGrid);
  for (int i = 0; i < kGrid; ++i) {
    const double theta = (i + 0.5) * (M_PI / 2.0) / kGrid;
    for (int j = 0; j < kGrid; ++j) {
      const double phi = (j + 0.5) * (M_PI / 2.0) / kGrid;
      const double ux = std::sin(theta) * std::cos(phi);
      const double uy = std::sin(theta) * std::sin(phi);
      const double uz = std::cos(theta);
      g.push_back(ux / room.length + uy / room.width + uz / room.height);
      w.push_back(std::sin(theta));
    }
  }
  auto edc = [&](double s) {
    double acc = 0.0;
    for (size_t k = 0; k < g.size(); ++k) acc += w[k] / g[k] * std::exp(-s * g[k]);
    return acc;
  };
  const double edc0 = edc(0.0);
  auto find_level = [&](double db) {
    const double want = edc0 * std::pow(10.0, db / 10.0);
    double lo = 0.0, hi = 1.0;
    while (edc(hi) > want) hi *= 2.0;
    for (int iter = 0; iter < 80; ++iter) {
      const double mid = 0.5 * (lo + hi);
      (edc(mid) > want ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  const double s5 = find_level(-5.0);
  const double s25 = find_level(-25.0);

  const int samples = 200;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < samples; ++i) {
    const double x = s5 + (s25 - s5) * i / (samples - 1);
    const double y = 10.0 * std::log10(edc(x) / edc0);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (samples * sxy - sx * sy) / (samples * sxx - sx * sx);
  return -60.0 / slope;
}

double T60ToAbsorption(const RoomSpec& room, AbsorptionModel model) {
  if (room.t60 <= 0.0) throw std::invalid_argument("t60_to_absorption: t60 must be > 0");
  const double area = room.SurfaceArea();
  if (area <= 0.0) throw std::invalid_argument("t60_to_absorption: zero surface area");
  const double sabine = 0.161 * room.Volume() / (room.t60 * area);
  switch (model) {
    case AbsorptionModel::kSabine:
      return std::min(sabine, 1.0);
    case AbsorptionModel::kEyring:
      return 1.0 - std::exp(-sabine);
    case AbsorptionModel::kIsm:
      // beta^2 = exp(-s60 / (c t60))
      return 1.0 - std::exp(-DirectionalDecayS60(room) / (kSpeedOfSound * room.t60));
  }
  throw std::invalid_argument("t60_to_absorption: bad model");
}

namespace {

// Decay time the image lattice actually produces for a given absorption.
double PredictedT60(const RoomSpec& room, double absorption) {
  if (absorption >= 1.0) return 0.0;
  return DirectionalDecayS60(room) / (-kSpeedOfSound * std::log1p(-absorption));
}

void CheckStrictlyInside(const RoomSpec& room, const Eigen::Vector3d& p,
                         const char* what) {
  if (!(p.x() > 0 && p.x() < room.length && p.y() > 0 && p.y() < room.width &&
        p.z() > 0 && p.z() < room.height))
    throw std::invalid_argument(std::string("simulate_rir: ") + what +
                                " not strictly inside the room");
}

}  // namespace

std::vector<Rir> SimulateRirs(const RoomSpec& room, const Eigen::Vector3d& source,
                              const std::vector<Eigen::Vector3d>& mics,
                              double absorption, const RirOptions& opts) {
  if (!(absorption > 0.0 && absorption <= 1.0))
    throw std::invalid_argument("simulate_rir: absorption must be in (0, 1]");
  CheckStrictlyInside(room, source, "source");
  double max_dist = 0.0;
  for (const auto& mic : mics) {
    CheckStrictlyInside(room, mic, "microphone");
    const double d = (source - mic).norm();
    if (d < 1e-6)
      throw std::invalid_argument("simulate_rir: source coincides with a microphone");
    max_dist = std::max(max_dist, d);
  }

  const double fs = opts.sample_rate;
  double duration = opts.duration_s;
  if (duration <= 0.0)
    duration = std::max(1.25 * PredictedT60(room, absorption), 0.02) +
               max_dist / kSpeedOfSound + 0.01;
  const auto num_samples = static_cast<Eigen::Index>(std::ceil(duration * fs));

  const double beta = std::sqrt(1.0 - absorption);
  const double meters_per_sample = kSpeedOfSound / fs;
  const double reach = num_samples * meters_per_sample;
  const int nx = static_cast<int>(std::ceil(reach / (2.0 * room.length)));
  const int ny = static_cast<int>(std::ceil(reach / (2.0 * room.width)));
  const int nz = static_cast<int>(std::ceil(reach / (2.0 * room.height)));

  // beta^k for every reflection count the lattice can produce.
  const int max_refl = 2 * (nx + ny + nz) + 3;
  std::vector<double> beta_pow(static_cast<size_t>(max_refl) + 1);
  beta_pow[0] = 1.0;
  for (size_t i = 1; i < beta_pow.size(); ++i) beta_pow[i] = beta_pow[i - 1] * beta;

  std::vector<Rir> rirs(mics.size());
  for (auto& r : rirs) {
    r.taps = Eigen::VectorXd::Zero(num_samples);
    r.sample_rate = fs;
  }

  const int sinc_half = static_cast<int>(std::lround(0.004 * fs));

  for (int mx = -nx; mx <= nx; ++mx) {
    for (int my = -ny; my <= ny; ++my) {
      for (int mz = -nz; mz <= nz; ++mz) {
        for (int q = 0; q <= 1; ++q) {
          for (int j = 0; j <= 1; ++j) {
            for (int k = 0; k <= 1; ++k) {
              if (opts.order_limit >= 0 &&
                  std::abs(2 * mx - q) + std::abs(2 * my - j) + std::abs(2 * mz - k) >
                      opts.order_limit)
                continue;
              const int refl = std::abs(mx - q) + std::abs(mx) + std::abs(my - j) +
                               std::abs(my) + std::abs(mz - k) + std::abs(mz);
              const double gain = beta_pow[static_cast<size_t>(refl)];
              if (gain == 0.0 && refl > 0) continue;
              const Eigen::Vector3d image(
                  (1 - 2 * q) * source.x() + 2.0 * mx * room.length,
                  (1 - 2 * j) * source.y() + 2.0 * my * room.width,
                  (1 - 2 * k) * source.z() + 2.0 * mz * room.height);
              for (size_t m = 0; m < mics.size(); ++m) {
                const double dist = (image - mics[m]).norm();
                const double delay = dist * fs / kSpeedOfSound;
                const double amp = gain / (4.0 * M_PI * dist);
                if (!opts.sinc_interp) {
                  const auto idx = static_cast<Eigen::Index>(std::lround(delay));
                  if (idx < num_samples) rirs[m].taps[idx] += amp;
                } else {
                  const auto base = static_cast<Eigen::Index>(std::floor(delay));
                  for (Eigen::Index t = base - sinc_half; t <= base + sinc_half; ++t) {
                    if (t < 0 || t >= num_samples) continue;
                    const double x = static_cast<double>(t) - delay;
                    const double sinc = x == 0.0 ? 1.0 : std::sin(M_PI * x) / (M_PI * x);
                    const double hann =
                        0.5 * (1.0 + std::cos(M_PI * x / (sinc_half + 1)));
                    rirs[m].taps[t] += amp * sinc * hann;
                  }
                }
              }
            }
          }
        }
      }
    }
  }
  return rirs;
}

Rir SimulateRir(const RoomSpec& room, const Eigen::Vector3d& source,
                const Eigen::Vector3d& mic, double absorption, const RirOptions& opts) {
  return SimulateRirs(room, source, {mic}, absorption, opts)[0];
}

double SchroederT60(const Rir& rir) {
  const Eigen::Index n = rir.taps.size();
  if (n < 2) throw std::invalid_argument("schroeder: too few taps");

  // Allen-Berkley 100 Hz high-pass. Nearest-sample image taps are all
  // positive, so late arrivals pile up coherently at DC and flatten the
  // raw decay curve; this strips that buildup before integrating.
  const double w = 2.0 * M_PI * 100.0 / rir.sample_rate;
  const double r1 = std::exp(-w);
  const double b1 = 2.0 * r1 * std::cos(w), b2 = -r1 * r1, a1 = -(1.0 + r1);
  Eigen::VectorXd taps(n);
  double y0 = 0.0, y1 = 0.0, y2 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    y2 = y1;
    y1 = y0;
    y0 = b1 * y1 + b2 * y2 + rir.taps[i];
    taps[i] = y0 + a1 * y1 + r1 * y2;
  }

  Eigen::VectorXd edc(n);
  double acc = 0.0;
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    acc += taps[i] * taps[i];
    edc[i] = acc;
  }
  if (acc <= 0.0) throw std::invalid_argument("schroeder: silent impulse response");

  Eigen::Index t5 = -1, t25 = -1;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double db = 10.0 * std::log10(edc[i] / acc);
    if (t5 < 0 && db <= -5.0) t5 = i;
    if (db <= -25.0) {
      t25 = i;
      break;
    }
  }
  if (t5 < 0 || t25 < 0 || t25 <= t5)
    throw std::runtime_error("schroeder: decay range not covered by the response");

  // Least-squares line on the EDC in dB over the fit range.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double count = static_cast<double>(t25 - t5 + 1);
  for (Eigen::Index i = t5; i <= t25; ++i) {
    const double x = static_cast<double>(i) / rir.sample_rate;
    const double y = 10.0 * std::log10(edc[i] / acc);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  if (!(slope < 0.0)) throw std::runtime_error("schroeder: non-decaying response");
  return -60.0 / slope;
}

SpatializeResult Spatialize(const std::vector<MultichannelWaveform>& dry_sources,
                            const SceneSpec& scene, const SpatializeOptions& opts) {
  if (dry_sources.empty()) throw std::invalid_argument("spatialize: no sources");
  if (dry_sources.size() != scene.sources.size())
    throw std::invalid_argument("spatialize: scene source count mismatch");
  for (const auto& d : dry_sources) {
    if (d.channel_count() != 1)
      throw std::invalid_argument("spatialize: dry sources must be mono");
    if (d.sample_rate != opts.sample_rate)
      throw std::invalid_argument("spatialize: sample-rate mismatch");
  }

  std::vector<Eigen::Vector3d> mics;
  for (int m = 0; m < scene.array.mic_count; ++m) mics.push_back(scene.array.MicPosition(m));

  const double absorption = T60ToAbsorption(scene.room, opts.absorption_model);

  // One shared RIR length keeps every reference the same shape.
  double max_dist = 0.0;
  for (const auto& src : scene.sources)
    for (const auto& mic : mics) max_dist = std::max(max_dist, (src - mic).norm());
  RirOptions ropts;
  ropts.sample_rate = opts.sample_rate;
  ropts.order_limit = opts.order_limit;
  ropts.sinc_interp = opts.sinc_interp;
  ropts.duration_s = std::max(1.25 * PredictedT60(scene.room, absorption), 0.02) +
                     max_dist / kSpeedOfSound + 0.01;

  Eigen::Index min_len = std::numeric_limits<Eigen::Index>::max();
  std::vector<std::vector<Eigen::VectorXd>> images(dry_sources.size());
  for (size_t s = 0; s < dry_sources.size(); ++s) {
    const auto rirs = SimulateRirs(scene.room, scene.sources[s], mics, absorption, ropts);
    images[s].resize(mics.size());
    for (size_t m = 0; m < mics.size(); ++m) {
      images[s][m] = FftConvolve(dry_sources[s].channels[0], rirs[m].taps);
      min_len = std::min(min_len, images[s][m].size());
    }
  }

  SpatializeResult result;
  result.references.resize(dry_sources.size());
  std::vector<Eigen::VectorXd> mix(mics.size(), Eigen::VectorXd::Zero(min_len));
  for (size_t s = 0; s < dry_sources.size(); ++s) {
    std::vector<Eigen::VectorXd> chans(mics.size());
    for (size_t m = 0; m < mics.size(); ++m) {
      chans[m] = images[s][m].head(min_len);
      mix[m] += chans[m];
    }
    result.references[s] = MultichannelWaveform(opts.sample_rate, std::move(chans));
  }
  result.mixture = MultichannelWaveform(opts.sample_rate, std::move(mix));
  return result;
}

}  // namespace sepkit
