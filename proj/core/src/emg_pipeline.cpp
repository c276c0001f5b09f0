#include "oie/emg_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oie::emg {
namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

std::vector<double> reversed(std::vector<double> v) {
  std::reverse(v.begin(), v.end());
  return v;
}

}  // namespace

Biquad::Biquad(double b0, double b1, double b2, double a1, double a2)
    : b0_(b0), b1_(b1), b2_(b2), a1_(a1), a2_(a2) {}

Biquad Biquad::butterworth_lowpass(double cutoff_hz, double rate_hz) {
  require(cutoff_hz > 0.0 && rate_hz > 2.0 * cutoff_hz,
          "Biquad: sampling rate must exceed twice the cutoff");
  double k = std::tan(std::numbers::pi * cutoff_hz / rate_hz);  // pre-warped
  double norm = 1.0 / (1.0 + std::numbers::sqrt2 * k + k * k);
  double b0 = k * k * norm;
  return Biquad(b0, 2.0 * b0, b0, 2.0 * (k * k - 1.0) * norm,
                (1.0 - std::numbers::sqrt2 * k + k * k) * norm);
}

Biquad Biquad::butterworth_highpass(double cutoff_hz, double rate_hz) {
  require(cutoff_hz > 0.0 && rate_hz > 2.0 * cutoff_hz,
          "Biquad: sampling rate must exceed twice the cutoff");
  double k = std::tan(std::numbers::pi * cutoff_hz / rate_hz);
  double norm = 1.0 / (1.0 + std::numbers::sqrt2 * k + k * k);
  return Biquad(norm, -2.0 * norm, norm, 2.0 * (k * k - 1.0) * norm,
                (1.0 - std::numbers::sqrt2 * k + k * k) * norm);
}

double Biquad::dc_gain() const { return (b0_ + b1_ + b2_) / (1.0 + a1_ + a2_); }

void Biquad::prime(double x0) {
  // Steady state for constant input: y = dc_gain * x0, solved for the
  // direct-form-II-transposed state registers.
  double y = dc_gain() * x0;
  s2_ = b2_ * x0 - a2_ * y;
  s1_ = y - b0_ * x0;
}

double Biquad::step(double x) {
  double y = b0_ * x + s1_;
  s1_ = b1_ * x - a1_ * y + s2_;
  s2_ = b2_ * x - a2_ * y;
  return y;
}

std::vector<double> Biquad::filter(std::span<const double> x) const {
  Biquad f = *this;
  if (!x.empty()) f.prime(x.front());
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = f.step(x[i]);
  return y;
}

EmgSeries envelope(const EmgSeries& raw, bool zero_phase) {
  require(raw.rate > 40.0, "envelope: rate must exceed 40 Hz for the 20 Hz high-pass");
  auto hp = Biquad::butterworth_highpass(20.0, raw.rate);
  auto lp = Biquad::butterworth_lowpass(15.0, raw.rate);
  auto run = [&](const Biquad& f, std::vector<double> x) {
    if (!zero_phase) return f.filter(x);
    return reversed(f.filter(reversed(f.filter(x))));
  };
  std::vector<double> y = run(hp, raw.samples);
  for (double& v : y) v = std::abs(v);
  y = run(lp, std::move(y));
  return {std::move(y), raw.rate};
}

Calibration calibrate(std::span<const std::pair<double, double>> pts) {
  require(pts.size() >= 2, "calibrate: need at least two (envelope, torque) points");
  double n = 0, su = 0, su2 = 0, st = 0, sut = 0;
  for (auto& [u, tau] : pts) {
    n += 1.0;
    su += u;
    su2 += u * u;
    st += tau;
    sut += u * tau;
  }
  double det = n * su2 - su * su;
  require(std::abs(det) > 1e-12 * std::max(1.0, su2 * n),
          "calibrate: degenerate design (identical envelope values)");
  double alpha0 = (n * sut - su * st) / det;
  double alpha1 = (st - alpha0 * su) / n;
  return {alpha0, alpha1};
}

ActivationDecomposition decompose(std::span<const double> tau_f, std::span<const double> tau_e) {
  require(tau_f.size() == tau_e.size(), "decompose: series lengths differ");
  ActivationDecomposition out;
  out.reciprocal.resize(tau_f.size());
  out.cocontraction.resize(tau_f.size());
  for (std::size_t i = 0; i < tau_f.size(); ++i) {
    out.reciprocal[i] = tau_f[i] - tau_e[i];
    out.cocontraction[i] = std::min(tau_f[i], tau_e[i]);
  }
  return out;
}

double trial_mean(std::span<const double> u, double rate) {
  require(!u.empty(), "trial_mean: empty series");
  require(rate > 0.0, "trial_mean: rate must be positive");
  if (u.size() == 1) return u[0];
  double sum = 0.5 * (u.front() + u.back());
  for (std::size_t i = 1; i + 1 < u.size(); ++i) sum += u[i];
  return sum / static_cast<double>(u.size() - 1);
}

std::vector<double> normalize(std::span<const double> trial_means) {
  require(trial_means.size() >= 2, "normalize: need at least two trial means");
  auto [lo_it, hi_it] = std::minmax_element(trial_means.begin(), trial_means.end());
  double lo = *lo_it, hi = *hi_it;
  require(hi > lo, "normalize: all trial means are equal (zero range)");
  std::vector<double> out(trial_means.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (trial_means[i] - lo) / (hi - lo);
  return out;
}

Spectrum spectrum(std::span<const double> samples, double rate) {
  const std::size_t n = samples.size();
  require(n >= 256, "spectrum: series too short (need at least 256 samples)");
  require(rate > 0.0, "spectrum: rate must be positive");

  std::vector<double> wx(n);
  double wsum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                     static_cast<double>(n - 1));
    wx[i] = w * samples[i];
    wsum += w;
  }

  // Direct real DFT with a precomputed twiddle table; index (i*k) mod n walks
  // the table, so no trig in the inner loop. A few ms for n ~ 2000.
  std::vector<double> cs(n), sn(n);
  for (std::size_t i = 0; i < n; ++i) {
    double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    cs[i] = std::cos(a);
    sn[i] = std::sin(a);
  }
  const std::size_t bins = n / 2 + 1;
  Spectrum out;
  out.freq_hz.resize(bins);
  out.amplitude.resize(bins);
  out.rate = rate;
  out.window_sum = wsum;
  for (std::size_t k = 0; k < bins; ++k) {
    double re = 0.0, im = 0.0;
    std::size_t idx = 0;
    for (std::size_t i = 0; i < n; ++i) {
      re += wx[i] * cs[idx];
      im -= wx[i] * sn[idx];
      idx += k;
      if (idx >= n) idx -= n;
    }
    out.freq_hz[k] = rate * static_cast<double>(k) / static_cast<double>(n);
    out.amplitude[k] = 2.0 * std::hypot(re, im) / wsum;
  }
  return out;
}

std::vector<Peak> find_peaks(const Spectrum& spec, double threshold, int smooth_bins) {
  require(threshold > 0.0, "find_peaks: threshold must be positive");
  require(smooth_bins >= 1, "find_peaks: smooth_bins must be at least 1");
  const auto& a = spec.amplitude;
  const int n = static_cast<int>(a.size());
  if (n < 3) return {};

  std::vector<double> sm(n);
  int half = smooth_bins / 2;
  for (int i = 0; i < n; ++i) {
    int lo = std::max(0, i - half), hi = std::min(n - 1, i + half);
    double s = 0.0;
    for (int k = lo; k <= hi; ++k) s += a[k];
    sm[i] = s / (hi - lo + 1);
  }

  std::vector<double> tmp = sm;
  std::nth_element(tmp.begin(), tmp.begin() + n / 2, tmp.end());
  double median = tmp[n / 2];
  double cut = threshold * median;

  std::vector<Peak> peaks;
  int last_bin = -10 * smooth_bins;
  for (int i = 1; i + 1 < n; ++i) {
    if (!(sm[i] > sm[i - 1] && sm[i] >= sm[i + 1] && sm[i] > cut)) continue;
    // refine to the raw-amplitude maximum inside the smoothing window
    int lo = std::max(1, i - half), hi = std::min(n - 2, i + half);
    int best = lo;
    for (int k = lo + 1; k <= hi; ++k)
      if (a[k] > a[best]) best = k;
    if (best - last_bin <= half) continue;  // same underlying peak
    last_bin = best;
    peaks.push_back({spec.freq_hz[best], a[best]});
  }
  return peaks;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size() && a.size() >= 2, "pearson: need equal-length series, n >= 2");
  double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  require(saa > 0.0 && sbb > 0.0, "pearson: zero-variance series");
  return sab / std::sqrt(saa * sbb);
}

int best_lag(std::span<const double> a, std::span<const double> b, int max_lag) {
  require(max_lag >= 0, "best_lag: max_lag must be non-negative");
  require(a.size() == b.size() && static_cast<int>(a.size()) > 2 * max_lag + 2,
          "best_lag: series too short for the requested lag range");
  int n = static_cast<int>(a.size());
  int best = 0;
  double best_r = -2.0;
  for (int lag = -max_lag; lag <= max_lag; ++lag) {
    int lo = std::max(0, -lag), hi = std::min(n, n - lag);
    std::span<const double> aa(a.data() + lo, hi - lo);
    std::span<const double> bb(b.data() + lo + lag, hi - lo);
    double r = pearson(aa, bb);
    if (r > best_r) {
      best_r = r;
      best = lag;
    }
  }
  return best;
}

}  // namespace oie::emg
