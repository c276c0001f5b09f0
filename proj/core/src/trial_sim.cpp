#include "oie/trial_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

#include "oie/emg_pipeline.hpp"

namespace oie::sim {
namespace {

constexpr double kDegPerRad = 180.0 / std::numbers::pi;
constexpr double kFrameDt = 0.01;     // 100 Hz recording/display
constexpr double kDotLifetime = 0.1;  // seconds
constexpr double kVerticalSdMm = 15.0;
constexpr double kVelocitySdMmS = 101.6;

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void redraw(CloudDot& dot, double sigma_c, Rng& rng) {
  dot.vertical_mm = rng.normal(0.0, kVerticalSdMm);
  dot.angular_mm = sigma_c > 0.0 ? rng.normal(0.0, sigma_c) : 0.0;
  dot.velocity_mm_s = rng.normal(0.0, kVelocitySdMmS);
}

// One-pole-pair low-pass used for the motion plan (2nd order Butterworth).
struct PlanFilter {
  emg::Biquad biquad;
  bool primed = false;
  explicit PlanFilter(double cutoff_hz, double rate_hz)
      : biquad(emg::Biquad::butterworth_lowpass(cutoff_hz, rate_hz)) {}
  double step(double x) {
    if (!primed) {
      biquad.prime(x);
      primed = true;
    }
    return biquad.step(x);
  }
};

struct State {
  double q = 0.0, dq = 0.0;    // wrist, rad
  double qc = 0.0, dqc = 0.0;  // controller, rad
};

struct Inputs {
  double plan_rad;        // held over the frame
  double ctrl_noise_rad;  // held over the frame
  bool coupled;
  double sigma_p;
  double u;
  double t0;
};

State derivative(const State& s, double t, const Inputs& in, const PlantConfig& plant,
                 const TargetSpec& target) {
  State d;
  d.q = s.dq;
  d.qc = s.dqc;

  double torque = -plant.damping * s.dq + plant.stiffness(in.u) * (in.plan_rad - s.q);
  if (in.coupled) {
    torque += coupling_torque(s.qc * kDegPerRad, s.q * kDegPerRad);
    torque += perturbation_torque(t, in.sigma_p);
  }
  d.dq = torque / plant.inertia;

  double ref = target_position(t, in.t0, target) / kDegPerRad + in.ctrl_noise_rad;
  d.dqc = plant.controller_kp * (ref - s.qc) - plant.controller_kd * s.dqc;
  return d;
}

State rk4(const State& s, double t, double h, const Inputs& in, const PlantConfig& plant,
          const TargetSpec& target) {
  auto axpy = [](const State& a, double f, const State& b) {
    return State{a.q + f * b.q, a.dq + f * b.dq, a.qc + f * b.qc, a.dqc + f * b.dqc};
  };
  State k1 = derivative(s, t, in, plant, target);
  State k2 = derivative(axpy(s, 0.5 * h, k1), t + 0.5 * h, in, plant, target);
  State k3 = derivative(axpy(s, 0.5 * h, k2), t + 0.5 * h, in, plant, target);
  State k4 = derivative(axpy(s, h, k3), t + h, in, plant, target);
  State out = s;
  out.q += h / 6.0 * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q);
  out.dq += h / 6.0 * (k1.dq + 2.0 * k2.dq + 2.0 * k3.dq + k4.dq);
  out.qc += h / 6.0 * (k1.qc + 2.0 * k2.qc + 2.0 * k3.qc + k4.qc);
  out.dqc += h / 6.0 * (k1.dqc + 2.0 * k2.dqc + 2.0 * k3.dqc + k4.dqc);
  return out;
}

}  // namespace

double target_position(double t, double t0, const TargetSpec& target) {
  require(t >= 0.0 && t <= target.duration, "target_position: t outside the trial");
  double ts = t + t0;
  return target.amplitude * std::sin(target.freq1 * ts) * std::sin(target.freq2 * ts);
}

std::vector<double> target_zero_offsets(const TargetSpec& target) {
  auto q = [&](double t) {
    return target.amplitude * std::sin(target.freq1 * t) * std::sin(target.freq2 * t);
  };
  std::vector<double> zeros = {0.0};  // double zero of the product at t = 0
  const double step = 1e-3;
  double prev = q(step);
  for (double t = 2.0 * step; t <= target.duration + 0.5 * step; t += step) {
    double cur = q(t);
    if (prev == 0.0) zeros.push_back(t - step);
    if (prev * cur < 0.0) {
      double a = t - step, b = t, fa = prev;
      while (b - a > 1e-9) {
        double m = 0.5 * (a + b), fm = q(m);
        if (fa * fm <= 0.0) {
          b = m;
        } else {
          a = m;
          fa = fm;
        }
      }
      zeros.push_back(0.5 * (a + b));
    }
    prev = cur;
  }
  return zeros;
}

double sample_offset(Rng& rng, const TargetSpec& target) {
  auto zeros = target_zero_offsets(target);
  return zeros[static_cast<std::size_t>(rng.uniform_index(zeros.size()))];
}

double perturbation_torque(double t, double sigma_p) {
  return sigma_p * std::sin(25.0 * t) * std::sin(30.0 * t);
}

double coupling_torque(double q_c_deg, double q_deg) { return 0.03 * (q_c_deg - q_deg); }

CloudFrame CloudFrame::initial(double sigma_c, Rng& rng) {
  CloudFrame frame;
  for (std::size_t i = 0; i < frame.dots.size(); ++i) {
    redraw(frame.dots[i], sigma_c, rng);
    frame.dots[i].age_s = static_cast<double>(i) * 0.0125;  // staggered births
  }
  return frame;
}

double CloudFrame::centroid_angular_mm() const {
  double s = 0.0;
  for (const auto& d : dots) s += d.angular_mm;
  return s / static_cast<double>(dots.size());
}

void cloud_step(CloudFrame& frame, double dt, double sigma_c, Rng& rng) {
  require(dt > 0.0, "cloud_step: dt must be positive");
  for (auto& dot : frame.dots) {
    dot.age_s += dt;
    if (dot.age_s >= kDotLifetime) {
      redraw(dot, sigma_c, rng);
      dot.age_s -= kDotLifetime;  // keeps the stagger
    }
  }
}

void Tracker::step(double reference, double dt) {
  // RK4 on qdd = kp (r - q) - kd qd with the reference held over dt.
  double q = q_, dq = dq_;
  auto acc = [&](double qq, double dd) { return kp_ * (reference - qq) - kd_ * dd; };
  double k1q = dq, k1v = acc(q, dq);
  double k2q = dq + 0.5 * dt * k1v, k2v = acc(q + 0.5 * dt * k1q, dq + 0.5 * dt * k1v);
  double k3q = dq + 0.5 * dt * k2v, k3v = acc(q + 0.5 * dt * k2q, dq + 0.5 * dt * k2v);
  double k4q = dq + dt * k3v, k4v = acc(q + dt * k3q, dq + dt * k3v);
  q_ += dt / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
  dq_ += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
}

TrialRecord simulate_trial(NoiseCondition condition, double u, const PlantConfig& plant,
                           std::uint64_t seed, bool solo, const TargetSpec& target) {
  require(u >= 0.0, "simulate_trial: cocontraction must be non-negative");
  require(plant.inertia > 0.0 && plant.damping >= 0.0, "simulate_trial: bad plant constants");
  const int substeps = static_cast<int>(std::llround(kFrameDt / plant.dt));
  require(substeps >= 1 && std::abs(substeps * plant.dt - kFrameDt) < 1e-12,
          "simulate_trial: plant.dt must divide the 10 ms display step");

  const int frames = static_cast<int>(std::llround(target.duration / kFrameDt));
  const double sigma_c = condition.sigma_c();
  const double sigma_p = solo ? 0.0 : condition.sigma_p();

  Rng rng(split_seed(seed, "trial"));
  const double t0 = sample_offset(rng, target);

  CloudFrame cloud = CloudFrame::initial(sigma_c, rng);
  PlanFilter plan_filter(plant.plan_cutoff_hz, 1.0 / kFrameDt);

  TrialRecord rec;
  rec.condition = condition;
  rec.solo = solo;
  rec.seed = seed;
  rec.u = u;
  auto reserve = [&](std::vector<double>& v) { v.reserve(frames); };
  reserve(rec.t);
  reserve(rec.q_star);
  reserve(rec.q);
  reserve(rec.q_c);
  reserve(rec.tau_couple);
  reserve(rec.tau_pert);
  reserve(rec.emg_f);
  reserve(rec.emg_e);

  State s;
  Inputs in;
  in.coupled = !solo;
  in.sigma_p = sigma_p;
  in.u = u;
  in.t0 = t0;

  for (int k = 0; k < frames; ++k) {
    double t = k * kFrameDt;
    if (k > 0) cloud_step(cloud, kFrameDt, sigma_c, rng);

    double qs = target_position(t, t0, target);
    double perceived = qs + cloud.centroid_angular_mm() * plant.screen_gain_deg_per_mm;
    in.plan_rad = plan_filter.step(perceived) / kDegPerRad;
    in.ctrl_noise_rad =
        plant.controller_noise_deg > 0.0
            ? rng.normal(0.0, plant.controller_noise_deg) / kDegPerRad
            : 0.0;

    double demand = plant.stiffness(u) * (in.plan_rad - s.q);  // Nm
    double f = u + std::max(0.0, plant.emg_gain * demand) + rng.normal(0.0, plant.emg_noise_sd);
    double e = u + std::max(0.0, -plant.emg_gain * demand) + rng.normal(0.0, plant.emg_noise_sd);

    rec.t.push_back(t);
    rec.q_star.push_back(qs);
    rec.q.push_back(s.q * kDegPerRad);
    rec.q_c.push_back(s.qc * kDegPerRad);
    rec.tau_couple.push_back(in.coupled
                                 ? coupling_torque(s.qc * kDegPerRad, s.q * kDegPerRad)
                                 : 0.0);
    rec.tau_pert.push_back(in.coupled ? perturbation_torque(t, sigma_p) : 0.0);
    rec.emg_f.push_back(std::max(0.0, f));
    rec.emg_e.push_back(std::max(0.0, e));

    for (int sub = 0; sub < substeps; ++sub)
      s = rk4(s, t + sub * plant.dt, plant.dt, in, plant, target);

    if (!std::isfinite(s.q) || !std::isfinite(s.dq) || !std::isfinite(s.qc) ||
        !std::isfinite(s.dqc))
      throw std::runtime_error("simulate_trial: state diverged at t=" + std::to_string(t));
  }
  return rec;
}

double tracking_error(const TrialRecord& rec) {
  require(!rec.t.empty() && rec.q.size() == rec.q_star.size(),
          "tracking_error: empty or inconsistent record");
  double s = 0.0;
  for (std::size_t i = 0; i < rec.q.size(); ++i) {
    double e = rec.q_star[i] - rec.q[i];
    s += e * e;
  }
  return std::sqrt(s / static_cast<double>(rec.q.size()));
}

namespace {

// Trial-mean cocontraction from the recorded envelopes; the first 0.5 s is
// excluded to keep startup transients out of the average.
double record_u_mean(const TrialRecord& rec) {
  auto dec = emg::decompose(rec.emg_f, rec.emg_e);
  std::size_t skip = std::min<std::size_t>(50, dec.cocontraction.size() - 1);
  std::span<const double> tail(dec.cocontraction.data() + skip, dec.cocontraction.size() - skip);
  return emg::trial_mean(tail, 1.0 / kFrameDt);
}

}  // namespace

std::vector<TrialSummary> run_protocol(const ProtocolSpec& spec, std::uint64_t seed) {
  require(spec.solo_trials >= 0 && spec.trials_per_block >= 0, "run_protocol: negative counts");
  std::vector<NoiseCondition> conditions = spec.conditions;
  if (conditions.empty()) {
    auto all = NoiseCondition::all();
    conditions.assign(all.begin(), all.end());
  }

  // Seeded-random block order (Fisher-Yates).
  Rng order_rng(split_seed(seed, "protocol/order"));
  for (std::size_t i = conditions.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(order_rng.uniform_index(i));
    std::swap(conditions[i - 1], conditions[j]);
  }

  std::array<double, 3> sv{}, sh{};
  for (int k = 0; k < 3; ++k) {
    sv[k] = visual_effective(kCloudDeviationMm[k], spec.visual);
    sh[k] = haptic_effective(kPerturbationNm[k], spec.haptic);
  }

  std::vector<TrialSummary> rows;
  double u = std::clamp(spec.u0, 0.0, spec.oie.u_max);

  auto run_one = [&](int block, int trial, bool solo, NoiseCondition cond) {
    std::uint64_t trial_seed = split_seed(
        seed, "protocol/block/" + std::to_string(block) + "/trial/" + std::to_string(trial));
    TrialRecord rec = simulate_trial(cond, u, spec.plant, trial_seed, solo, spec.target);
    TrialSummary row;
    row.seed = seed;
    row.block = block;
    row.trial = trial;
    row.solo = solo;
    row.condition = cond;
    row.error_deg = tracking_error(rec);
    row.u_mean = record_u_mean(rec);
    rows.push_back(row);

    if (spec.rule == AdaptationRule::oie) {
      ChannelNoise visual = sv[static_cast<int>(cond.visual)];
      ChannelNoise haptic =
          solo ? ChannelNoise::infinite() : ChannelNoise(sh[static_cast<int>(cond.haptic)]);
      u = oie_update(u, visual, haptic, spec.oie);
    } else {
      u = std::min(tem_update(u, row.error_deg, spec.tem), spec.oie.u_max);
    }
  };

  for (int trial = 0; trial < spec.solo_trials; ++trial)
    run_one(-1, trial, true, NoiseCondition{});
  for (std::size_t b = 0; b < conditions.size(); ++b)
    for (int trial = 0; trial < spec.trials_per_block; ++trial)
      run_one(static_cast<int>(b), trial, false, conditions[b]);

  // Normalize over this run's interaction trials (solo rows reuse the range).
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& row : rows) {
    if (row.solo) continue;
    lo = std::min(lo, row.u_mean);
    hi = std::max(hi, row.u_mean);
  }
  for (auto& row : rows)
    row.u_norm = hi > lo ? (row.u_mean - lo) / (hi - lo) : 0.0;
  return rows;
}

std::vector<ConditionSlope> slope_report(const std::vector<TrialSummary>& dataset, Metric metric) {
  auto value = [&](const TrialSummary& row) {
    switch (metric) {
      case Metric::error: return row.error_deg;
      case Metric::u_mean: return row.u_mean;
      default: return row.u_norm;
    }
  };
  std::map<std::string, std::vector<std::pair<double, double>>> groups;
  for (const auto& row : dataset)
    groups[row.condition_label()].push_back({static_cast<double>(row.trial), value(row)});

  std::vector<ConditionSlope> out;
  for (auto& [label, pts] : groups) {
    if (pts.size() < 3)
      throw std::invalid_argument("slope_report: need at least three trials per condition");
    double n = static_cast<double>(pts.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto& [x, y] : pts) {
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    double det = n * sxx - sx * sx;
    double slope = (n * sxy - sx * sy) / det;
    out.push_back({label, slope, (sy - slope * sx) / n, static_cast<int>(pts.size())});
  }
  return out;
}

}  // namespace oie::sim
