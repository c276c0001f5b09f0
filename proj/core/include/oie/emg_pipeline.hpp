#ifndef OIE_EMG_PIPELINE_HPP
#define OIE_EMG_PIPELINE_HPP

#include <span>
#include <utility>
#include <vector>

namespace oie::emg {

struct EmgSeries {
  std::vector<double> samples;
  double rate = 100.0;  // Hz
};

/// Second-order IIR section (direct form II transposed) with Butterworth
/// designers via the bilinear transform (pre-warped cutoffs).
class Biquad {
 public:
  static Biquad butterworth_lowpass(double cutoff_hz, double rate_hz);
  static Biquad butterworth_highpass(double cutoff_hz, double rate_hz);

  /// Sets the internal state to the steady state for a constant input x0,
  /// suppressing the startup transient.
  void prime(double x0);
  double step(double x);

  /// Filters a whole series (causal, single pass), primed on the first sample.
  std::vector<double> filter(std::span<const double> x) const;

  double dc_gain() const;

 private:
  Biquad(double b0, double b1, double b2, double a1, double a2);
  double b0_, b1_, b2_, a1_, a2_;
  double s1_ = 0.0, s2_ = 0.0;
};

/// EMG envelope: 20 Hz second-order Butterworth high-pass, rectification,
/// 15 Hz second-order Butterworth low-pass. Causal by default; zero_phase runs
/// each stage forward-backward instead.
EmgSeries envelope(const EmgSeries& raw, bool zero_phase = false);

/// Linear envelope-to-torque map tau = alpha0 * u + alpha1.
struct Calibration {
  double alpha0 = 1.0;  // Nm per envelope unit
  double alpha1 = 0.0;  // Nm offset
  bool positive() const { return alpha0 > 0.0 && alpha1 > 0.0; }
};

/// Ordinary least squares over (mean envelope, torque) pairs. Callers should
/// check positive(); a violating fit is reported, not rejected.
Calibration calibrate(std::span<const std::pair<double, double>> envelope_torque);

/// Pointwise reciprocal activation tau_f - tau_e and cocontraction
/// min(tau_f, tau_e). For non-negative inputs the identity
/// tau_f = u + max(0, tau), tau_e = u + max(0, -tau) reconstructs the inputs.
struct ActivationDecomposition {
  std::vector<double> reciprocal;
  std::vector<double> cocontraction;
};
ActivationDecomposition decompose(std::span<const double> tau_f, std::span<const double> tau_e);

/// Time average by trapezoidal quadrature over the sampled span.
double trial_mean(std::span<const double> u, double rate);

/// Per-participant min-max normalization (u - min)/(max - min).
/// Throws when fewer than two distinct values are present.
std::vector<double> normalize(std::span<const double> trial_means);

/// Hann-windowed one-sided magnitude spectrum. Amplitudes are scaled so a
/// full-length on-bin sine of amplitude A reads A.
struct Spectrum {
  std::vector<double> freq_hz;
  std::vector<double> amplitude;
  double rate = 0.0;
  double window_sum = 0.0;  // sum of Hann coefficients, for energy bookkeeping
};
Spectrum spectrum(std::span<const double> samples, double rate);

struct Peak {
  double freq_hz;
  double amplitude;
};

/// Peaks are interior local maxima of the smoothed amplitude (moving average,
/// smooth_bins wide) exceeding threshold x median; each is refined to the raw
/// amplitude maximum within the smoothing window. Smoothing keeps Rayleigh
/// noise excursions below the threshold while leaving tone bins dominant.
std::vector<Peak> find_peaks(const Spectrum& spec, double threshold = 3.0, int smooth_bins = 5);

/// Zero-lag Pearson correlation coefficient.
double pearson(std::span<const double> a, std::span<const double> b);

/// Lag (in samples, within +/-max_lag) maximizing the Pearson correlation of
/// a against b shifted; reported alongside zero-lag correlations.
int best_lag(std::span<const double> a, std::span<const double> b, int max_lag);

}  // namespace oie::emg

#endif  // OIE_EMG_PIPELINE_HPP
