#include <hhg/spectra.hpp>

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <memory>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace hhg {

char const* to_string(window_kind w) { return w == window_kind::hann ? "hann" : "rect"; }

double power_spectrum_data::resolution() const {
	if (series_length > 0 && dt > 0.0) return 2.0 * std::numbers::pi / (static_cast<double>(series_length) * dt);
	if (frequencies.size() > 1) return frequencies[1] - frequencies[0];
	return 0.0;
}

std::size_t power_spectrum_data::nearest_bin(double omega) const {
	auto const it = std::lower_bound(frequencies.begin(), frequencies.end(), omega);
	if (it == frequencies.begin()) return 0;
	if (it == frequencies.end()) return frequencies.size() - 1;
	auto const hi = static_cast<std::size_t>(it - frequencies.begin());
	return (omega - frequencies[hi - 1] <= frequencies[hi] - omega) ? hi - 1 : hi;
}

void power_spectrum_data::normalize_at(double omega, double value) {
	auto const bin = nearest_bin(omega);
	if (!(power[bin] > 0.0)) throw std::domain_error("normalize_at: reference bin has zero power");
	double const scale = value / power[bin];
	for (double& p : power) p *= scale;
	ref_frequency = frequencies[bin];
	ref_value = value;
}

std::vector<double> dipole_acceleration(trajectory const& traj, atom_params const& atom, pulse_params const& pulse) {
	auto const n = traj.dipole_series.size();
	if (n == 0 || traj.inversion_series.size() != n || traj.feedback_series.size() != n)
		throw std::invalid_argument("dipole_acceleration: trajectory lacks the full-resolution series");
	double const w0 = atom.omega0;
	std::vector<double> out(n);
	for (std::size_t k = 0; k < n; ++k) {
		double const drive = evaluate_pulse(pulse, traj.sample_time(k));
		out[k] = w0 * (-w0 * traj.dipole_series[k] + drive * traj.inversion_series[k] + traj.feedback_series[k]);
	}
	return out;
}

namespace {

struct fftw_free_deleter {
	void operator()(void* p) const { fftw_free(p); }
};

} // namespace

power_spectrum_data power_spectrum(std::span<double const> series, double dt, window_kind window,
                                   std::size_t pad_factor) {
	if (series.size() < 2) throw std::invalid_argument("power_spectrum: need at least two samples");
	if (!(dt > 0.0)) throw std::invalid_argument("power_spectrum: dt must be positive");
	if (pad_factor == 0) throw std::invalid_argument("power_spectrum: pad_factor must be at least 1");

	auto const len = series.size();
	auto const n_fft = std::bit_ceil(len * pad_factor);
	auto const n_out = n_fft / 2 + 1;

	std::unique_ptr<double, fftw_free_deleter> in(fftw_alloc_real(n_fft));
	std::unique_ptr<fftw_complex, fftw_free_deleter> out(fftw_alloc_complex(n_out));
	// planned before filling the input
	fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(n_fft), in.get(), out.get(), FFTW_ESTIMATE);
	if (plan == nullptr) throw std::runtime_error("power_spectrum: FFTW planning failed");

	for (std::size_t k = 0; k < len; ++k) {
		double wgt = 1.0;
		if (window == window_kind::hann)
			wgt = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(len - 1));
		in.get()[k] = wgt * series[k];
	}
	std::fill(in.get() + len, in.get() + n_fft, 0.0);
	fftw_execute(plan);
	fftw_destroy_plan(plan);

	power_spectrum_data s;
	s.window = window;
	s.series_length = len;
	s.fft_length = n_fft;
	s.dt = dt;
	s.frequencies.resize(n_out);
	s.power.resize(n_out);
	double const dw = 2.0 * std::numbers::pi / (static_cast<double>(n_fft) * dt);
	for (std::size_t k = 0; k < n_out; ++k) {
		s.frequencies[k] = dw * static_cast<double>(k);
		s.power[k] = out.get()[k][0] * out.get()[k][0] + out.get()[k][1] * out.get()[k][1];
	}
	return s;
}

double parseval_energy(power_spectrum_data const& s) {
	if (s.fft_length == 0) throw std::invalid_argument("parseval_energy: not an FFT spectrum");
	double sum = s.power.front() + s.power.back();
	for (std::size_t k = 1; k + 1 < s.power.size(); ++k) sum += 2.0 * s.power[k];
	return sum / static_cast<double>(s.fft_length);
}

power_spectrum_data photon_distribution_spectrum(mode_grid const& grid, std::span<double const> photons) {
	if (photons.size() != grid.size())
		throw std::invalid_argument("photon_distribution_spectrum: photon array does not match the mode grid");
	power_spectrum_data s;
	s.frequencies.assign(grid.frequencies().begin(), grid.frequencies().end());
	s.power.reserve(photons.size());
	for (double n : photons) s.power.push_back(std::max(0.0, n));
	return s;
}

std::vector<spectral_peak> find_peaks(power_spectrum_data const& s, double relative_threshold) {
	std::vector<spectral_peak> peaks;
	auto const& p = s.power;
	if (p.size() < 3) return peaks;
	double const floor = relative_threshold * *std::max_element(p.begin(), p.end());
	for (std::size_t k = 1; k + 1 < p.size(); ++k) {
		if (!(p[k] > floor) || !(p[k] > p[k - 1]) || !(p[k] >= p[k + 1])) continue;
		spectral_peak pk;
		pk.bin = k;
		pk.height = p[k];
		pk.frequency = s.frequencies[k];
		if (p[k - 1] > 0.0 && p[k + 1] > 0.0) {
			double const l = std::log(p[k - 1]), c = std::log(p[k]), r = std::log(p[k + 1]);
			double const denom = l - 2.0 * c + r;
			if (denom < 0.0) {
				double const shift = 0.5 * (l - r) / denom;
				double const step = 0.5 * (s.frequencies[k + 1] - s.frequencies[k - 1]);
				pk.frequency += std::clamp(shift, -0.5, 0.5) * step;
			}
		}
		peaks.push_back(pk);
	}
	return peaks;
}

double comparison_report::max_abs_offset() const {
	double m = 0.0;
	for (auto const& pk : peaks) m = std::max(m, std::abs(pk.offset));
	return m;
}

void comparison_report::write(std::ostream& out, double unit) const {
	out << "# spectrum comparison\n";
	out << "ref_frequency " << ref_frequency / unit << '\n';
	out << "scale " << scale << '\n';
	out << "peaks " << peaks.size() << '\n';
	out << "max_abs_offset " << max_abs_offset() / unit << '\n';
	out << "# frequency_a frequency_b offset height_ratio\n";
	for (auto const& pk : peaks)
		out << "peak " << pk.frequency_a / unit << ' ' << pk.frequency_b / unit << ' ' << pk.offset / unit << ' '
		    << pk.height_ratio << '\n';
}

comparison_report compare_spectra(power_spectrum_data const& a, power_spectrum_data const& b, double ref_frequency,
                                  double relative_threshold) {
	if (a.frequencies.empty() || b.frequencies.empty()) throw std::invalid_argument("compare_spectra: empty spectrum");
	auto in_range = [&](power_spectrum_data const& s) {
		return ref_frequency >= s.frequencies.front() && ref_frequency <= s.frequencies.back();
	};
	if (!in_range(a) || !in_range(b))
		throw std::invalid_argument("compare_spectra: reference frequency outside a spectrum");

	double const pa = a.power[a.nearest_bin(ref_frequency)];
	double const pb = b.power[b.nearest_bin(ref_frequency)];
	if (!(pa > 0.0) || !(pb > 0.0)) throw std::domain_error("compare_spectra: reference bin has zero power");

	comparison_report rep;
	rep.ref_frequency = ref_frequency;
	rep.scale = pa / pb;

	auto const peaks_a = find_peaks(a, relative_threshold);
	auto const peaks_b = find_peaks(b, relative_threshold);
	if (peaks_b.empty()) return rep;
	for (auto const& pk : peaks_a) {
		auto const best = std::min_element(peaks_b.begin(), peaks_b.end(), [&](auto const& x, auto const& y) {
			return std::abs(x.frequency - pk.frequency) < std::abs(y.frequency - pk.frequency);
		});
		peak_match m;
		m.frequency_a = pk.frequency;
		m.frequency_b = best->frequency;
		m.offset = best->frequency - pk.frequency;
		m.height_ratio = rep.scale * best->height / pk.height;
		rep.peaks.push_back(m);
	}
	return rep;
}

namespace {

struct linear_fit {
	double a, b, c, rss;
};

linear_fit fit_at(std::span<double const> t, std::span<double const> y, double omega) {
	// normal equations for [1, cos, sin]
	double s[3][3] = {}, r[3] = {};
	for (std::size_t k = 0; k < t.size(); ++k) {
		double const basis[3] = {1.0, std::cos(omega * t[k]), std::sin(omega * t[k])};
		for (int i = 0; i < 3; ++i) {
			r[i] += basis[i] * y[k];
			for (int j = 0; j < 3; ++j) s[i][j] += basis[i] * basis[j];
		}
	}
	// Cramer's rule
	auto det3 = [](double m[3][3]) {
		return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
		       m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
	};
	double const d = det3(s);
	double coef[3];
	for (int col = 0; col < 3; ++col) {
		double m[3][3];
		for (int i = 0; i < 3; ++i)
			for (int j = 0; j < 3; ++j) m[i][j] = (j == col) ? r[i] : s[i][j];
		coef[col] = det3(m) / d;
	}
	double rss = 0.0;
	for (std::size_t k = 0; k < t.size(); ++k) {
		double const e = y[k] - coef[0] - coef[1] * std::cos(omega * t[k]) - coef[2] * std::sin(omega * t[k]);
		rss += e * e;
	}
	return {coef[0], coef[1], coef[2], rss};
}

} // namespace

sinusoid_fit fit_sinusoid(std::span<double const> t, std::span<double const> y, double omega_lo, double omega_hi) {
	if (t.size() != y.size() || t.size() < 4) throw std::invalid_argument("fit_sinusoid: need >= 4 paired samples");
	if (!(omega_hi > omega_lo && omega_lo > 0.0)) throw std::invalid_argument("fit_sinusoid: bad frequency range");

	// coarse scan fine enough to land in the right residual basin
	double const span_t = t.back() - t.front();
	double const coarse = std::min((omega_hi - omega_lo) / 16.0, 0.25 * std::numbers::pi / span_t);
	double best_w = omega_lo, best_rss = fit_at(t, y, omega_lo).rss;
	for (double w = omega_lo + coarse; w <= omega_hi; w += coarse) {
		double const rss = fit_at(t, y, w).rss;
		if (rss < best_rss) best_rss = rss, best_w = w;
	}

	// golden-section refinement
	double lo = std::max(omega_lo, best_w - coarse), hi = std::min(omega_hi, best_w + coarse);
	double const g = 0.5 * (std::sqrt(5.0) - 1.0);
	double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
	double f1 = fit_at(t, y, x1).rss, f2 = fit_at(t, y, x2).rss;
	for (int it = 0; it < 100 && hi - lo > 1e-12 * hi; ++it) {
		if (f1 < f2) {
			hi = x2, x2 = x1, f2 = f1;
			x1 = hi - g * (hi - lo), f1 = fit_at(t, y, x1).rss;
		} else {
			lo = x1, x1 = x2, f1 = f2;
			x2 = lo + g * (hi - lo), f2 = fit_at(t, y, x2).rss;
		}
	}
	double const w = 0.5 * (lo + hi);
	auto const f = fit_at(t, y, w);
	return {w, f.a, std::hypot(f.b, f.c), std::sqrt(f.rss / static_cast<double>(t.size()))};
}

} // namespace hhg
