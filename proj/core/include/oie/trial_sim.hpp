#ifndef OIE_TRIAL_SIM_HPP
#define OIE_TRIAL_SIM_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "oie/adaptation.hpp"
#include "oie/conditions.hpp"
#include "oie/noise_models.hpp"
#include "oie/rng.hpp"

namespace oie::sim {

/// Multi-sine tracking target q*(t) = amplitude * sin(f1 t*) * sin(f2 t*),
/// t* = t + t0, with the trial offset t0 drawn from the zero set of q*.
struct TargetSpec {
  double amplitude = 18.5;  // degrees
  double freq1 = 2.031;     // rad/s
  double freq2 = 1.093;     // rad/s
  double duration = 20.0;   // seconds
};

double target_position(double t, double t0, const TargetSpec& target = {});

/// All zeros of q* on [0, duration], each located by bisection to 1e-9 s.
std::vector<double> target_zero_offsets(const TargetSpec& target = {});

/// Uniform draw from target_zero_offsets.
double sample_offset(Rng& rng, const TargetSpec& target = {});

/// Haptic perturbation sigma_p * sin(25 t) * sin(30 t), in Nm. Its amplitude
/// spectrum has exactly two lines, near 0.796 Hz and 8.754 Hz.
double perturbation_torque(double t, double sigma_p);

/// Compliant virtual spring between the controller and the wrist:
/// 0.03 Nm per degree of angle difference.
double coupling_torque(double q_c_deg, double q_deg);

/// One dot of the visual cloud; offsets are relative to the nominal target.
struct CloudDot {
  double vertical_mm = 0.0;
  double angular_mm = 0.0;
  double velocity_mm_s = 0.0;
  double age_s = 0.0;
};

/// Eight dots, redrawn when 100 ms old; birth ages are staggered by 12.5 ms
/// so one dot refreshes every 12.5 ms on average.
struct CloudFrame {
  std::array<CloudDot, 8> dots{};

  static CloudFrame initial(double sigma_c, Rng& rng);
  /// Mean angular offset of the eight dots (mm).
  double centroid_angular_mm() const;
};

/// Ages the dots by dt and redraws every dot that reached 100 ms from
/// N(0, 15 mm) vertical, N(0, sigma_c) angular, N(0, 101.6 mm/s) velocity.
void cloud_step(CloudFrame& frame, double dt, double sigma_c, Rng& rng);

/// Critically-damped second-order tracker standing in for the robot's
/// tracking controller: qdd = kp (r - q) - kd qd.
class Tracker {
 public:
  Tracker(double kp, double kd) : kp_(kp), kd_(kd) {}
  void step(double reference, double dt);
  double position() const { return q_; }
  double velocity() const { return dq_; }

 private:
  double kp_, kd_;
  double q_ = 0.0, dq_ = 0.0;
};

/// Wrist plant, controller stand-in and display parameters. The plant and
/// controller values are artifact choices (config-overridable), not measured
/// quantities.
struct PlantConfig {
  double inertia = 0.005;   // kg m^2
  double damping = 0.05;    // Nm s / rad
  double k0 = 0.1;          // Nm/rad stiffness at u = 0
  double k1 = 2.0;          // Nm/rad stiffness gain per unit cocontraction
  double plan_cutoff_hz = 2.0;          // low-pass on the perceived target
  double screen_gain_deg_per_mm = 0.25; // display mapping for cloud offsets
  double controller_kp = 400.0;
  double controller_kd = 40.0;          // 2*sqrt(kp): critically damped
  double controller_noise_deg = 0.0;    // optional perception noise, sd per frame
  double emg_gain = 1.0;                // envelope units per Nm of demand
  double emg_noise_sd = 0.002;          // envelope noise, sd per sample
  double dt = 0.001;                    // integration step; must divide 10 ms

  double stiffness(double u) const { return k0 + k1 * u; }
};

/// Time series of one simulated trial, sampled at 100 Hz (2000 samples).
struct TrialRecord {
  std::vector<double> t;
  std::vector<double> q_star;      // target, degrees
  std::vector<double> q;           // wrist angle, degrees
  std::vector<double> q_c;         // controller angle, degrees
  std::vector<double> tau_couple;  // Nm
  std::vector<double> tau_pert;    // Nm
  std::vector<double> emg_f;       // flexor envelope
  std::vector<double> emg_e;       // extensor envelope
  NoiseCondition condition{};
  bool solo = false;
  std::uint64_t seed = 0;
  double u = 0.0;  // cocontraction setpoint
};

/// Integrates the coupled wrist/controller system with a fixed-step 4th-order
/// scheme at plant.dt and records at 100 Hz. The wrist is pulled toward a
/// motion plan (the low-passed cloud-perceived target) by a stiffness that
/// grows with the cocontraction setpoint; the coupling spring and the
/// perturbation act on top. Solo trials have no coupling and no perturbation.
/// Identical seeds give bit-identical records; halving plant.dt leaves every
/// noise draw unchanged. Throws std::runtime_error on non-finite state.
TrialRecord simulate_trial(NoiseCondition condition, double u, const PlantConfig& plant,
                           std::uint64_t seed, bool solo = false,
                           const TargetSpec& target = {});

/// Root-mean-square of q* - q over the recorded samples, degrees.
double tracking_error(const TrialRecord& rec);

enum class AdaptationRule { oie, tem };

/// Protocol description: nine initial solo trials, then one block per
/// condition (seeded-random order) with trials_per_block trials each. The
/// cocontraction setpoint evolves between trials by the chosen rule; solo
/// trials update with an unavailable haptic channel.
struct ProtocolSpec {
  int solo_trials = 9;
  int trials_per_block = 9;
  double u0 = 0.2;
  AdaptationRule rule = AdaptationRule::oie;
  OieParams oie{};
  TemParams tem{};
  VisualRegression visual{};
  HapticRegression haptic{};
  PlantConfig plant{};
  TargetSpec target{};
  std::vector<NoiseCondition> conditions{};  // empty = all nine
};

struct TrialSummary {
  std::uint64_t seed = 0;
  int block = 0;  // -1 for the solo block
  int trial = 0;
  bool solo = false;
  NoiseCondition condition{};
  double error_deg = 0.0;
  double u_mean = 0.0;
  double u_norm = 0.0;  // min-max over this run's interaction trials

  std::string visual_label() const { return "V" + std::to_string(static_cast<int>(condition.visual)); }
  std::string haptic_label() const {
    return solo ? "NONE" : "H" + std::to_string(static_cast<int>(condition.haptic));
  }
  std::string condition_label() const { return solo ? "SOLO" : condition.name(); }
};

std::vector<TrialSummary> run_protocol(const ProtocolSpec& spec, std::uint64_t seed);

enum class Metric { error, u_mean, u_norm };

struct ConditionSlope {
  std::string condition;
  double slope = 0.0;
  double intercept = 0.0;
  int trials = 0;
};

/// Ordinary least-squares slope of the metric against the within-block trial
/// index, one row per condition; requires at least three trials per condition.
std::vector<ConditionSlope> slope_report(const std::vector<TrialSummary>& dataset, Metric metric);

}  // namespace oie::sim

#endif  // OIE_TRIAL_SIM_HPP
