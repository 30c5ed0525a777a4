#pragma once

#include "zblab/dynamics.hpp"

#include <unsupported/Eigen/FFT>

#include <numbers>
#include <optional>
#include <span>

namespace zblab {

struct SpectralPeak {
  double frequency; //!< angular, energy units
  double amplitude;
};

struct SpectrumReport {
  double frequency = 0.0;
  double amplitude = 0.0;
  std::vector<SpectralPeak> secondary;
  double fit_residual = 0.0; //!< rms of signal minus fitted sinusoid + offset
  int component = 0;
};

//! Oscillations with a detrended peak below this are reported as absent.
inline constexpr double spectrum_noise_floor = 1e-12;

namespace detail {

struct SinusoidFit {
  double amplitude;
  double rms;
};

//! Least squares a cos(f t) + b sin(f t) + c.
inline SinusoidFit fit_sinusoid(std::span<const double> t, std::span<const double> y, double f) {
  const auto n = Eigen::Index(y.size());
  Eigen::MatrixXd A(n, 3);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    A(i, 0) = std::cos(f * t[std::size_t(i)]);
    A(i, 1) = std::sin(f * t[std::size_t(i)]);
    A(i, 2) = 1.0;
    b(i) = y[std::size_t(i)];
  }
  const Eigen::Vector3d x = A.colPivHouseholderQr().solve(b);
  const double rms = std::sqrt((A * x - b).squaredNorm() / double(n));
  return {std::hypot(x(0), x(1)), rms};
}

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n)
    p <<= 1;
  return p;
}

} // namespace detail

//! Hann-windowed, 8x zero-padded periodogram with parabolic interpolation of
//! the dominant peak; the amplitude comes from a least-squares sinusoid fit at
//! the interpolated frequency.
inline SpectrumReport dominant_frequency(std::span<const double> times,
                                         std::span<const double> signal) {
  const std::size_t n = signal.size();
  if (n < 64 || times.size() != n)
    throw Error(ErrorKind::InsufficientSamples, "need at least 64 samples");
  const double dt = (times.back() - times.front()) / double(n - 1);
  if (!(dt > 0.0))
    throw Error(ErrorKind::InsufficientSamples, "time samples must increase");
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs((times[i] - times[i - 1]) - dt) > 1e-9 * dt)
      throw Error(ErrorKind::InsufficientSamples, "time samples must be uniform");

  double mean = 0.0;
  for (const double v : signal)
    mean += v;
  mean /= double(n);
  double peak = 0.0;
  for (const double v : signal)
    peak = std::max(peak, std::abs(v - mean));

  SpectrumReport out;
  if (peak <= spectrum_noise_floor) {
    out.amplitude = peak;
    return out;
  }

  const std::size_t padded = 8 * detail::next_pow2(n);
  std::vector<cplx> buffer(padded, cplx(0.0));
  double gain = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * double(i) / double(n - 1));
    buffer[i] = w * (signal[i] - mean);
    gain += w;
  }
  Eigen::FFT<double> fft;
  std::vector<cplx> spec;
  fft.fwd(spec, buffer);
  const std::size_t half = padded / 2;
  std::vector<double> mag(half + 1);
  for (std::size_t b = 0; b <= half; ++b)
    mag[b] = std::abs(spec[b]);

  std::size_t best = 1;
  for (std::size_t b = 1; b < half; ++b)
    if (mag[b] > mag[best])
      best = b;
  double offset = 0.0;
  if (best > 0 && best < half) {
    const double a = mag[best - 1], c = mag[best], d = mag[best + 1];
    const double denom = a - 2.0 * c + d;
    if (denom != 0.0)
      offset = 0.5 * (a - d) / denom;
  }
  const double bin_width = 2.0 * std::numbers::pi / (double(padded) * dt);
  out.frequency = (double(best) + offset) * bin_width;
  const auto fit = detail::fit_sinusoid(times, signal, out.frequency);
  out.amplitude = fit.amplitude;
  out.fit_residual = fit.rms;

  // other local maxima outside the main lobe (Hann lobe half-width: 2 raw bins)
  const double lobe = 2.0 * double(padded) / double(n);
  std::vector<std::pair<double, std::size_t>> others;
  for (std::size_t b = 1; b < half; ++b) {
    if (std::abs(double(b) - double(best)) <= lobe)
      continue;
    if (mag[b] > mag[b - 1] && mag[b] >= mag[b + 1])
      others.emplace_back(mag[b], b);
  }
  std::sort(others.begin(), others.end(), [](auto &x, auto &y) { return x.first > y.first; });
  for (std::size_t i = 0; i < std::min<std::size_t>(3, others.size()); ++i)
    out.secondary.push_back({double(others[i].second) * bin_width, 2.0 * others[i].first / gain});

  const double span = times.back() - times.front() + dt;
  if (span < 4.0 * 2.0 * std::numbers::pi / out.frequency)
    throw Error(ErrorKind::InsufficientSamples, "samples span fewer than 4 periods");
  return out;
}

//! Spectrum of one current component; by default the component with the
//! largest variance.
inline SpectrumReport zb_spectrum(const TrajectoryRecord &traj,
                                  std::optional<int> component = std::nullopt) {
  int c = 0;
  if (component) {
    c = *component;
  } else {
    double best = -1.0;
    for (int i = 0; i < 3; ++i) {
      double mean = 0.0, var = 0.0;
      for (const auto &j : traj.current)
        mean += j(i);
      mean /= double(std::max<std::size_t>(1, traj.size()));
      for (const auto &j : traj.current)
        var += (j(i) - mean) * (j(i) - mean);
      if (var > best) {
        best = var;
        c = i;
      }
    }
  }
  std::vector<double> y;
  for (const auto &j : traj.current)
    y.push_back(j(c));
  auto report = dominant_frequency(traj.times, y);
  report.component = c;
  return report;
}

} // namespace zblab
