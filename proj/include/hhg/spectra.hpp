#ifndef HHG_SPECTRA_HPP
#define HHG_SPECTRA_HPP

#include <hhg/meanfield.hpp>
#include <hhg/model.hpp>

#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

namespace hhg {

enum class window_kind { rect, hann };

char const* to_string(window_kind w);

struct power_spectrum_data {
	std::vector<double> frequencies; // angular frequency, increasing
	std::vector<double> power;       // >= 0
	window_kind window = window_kind::rect;
	double ref_frequency = std::numeric_limits<double>::quiet_NaN();
	double ref_value = std::numeric_limits<double>::quiet_NaN();
	std::size_t series_length = 0;
	std::size_t fft_length = 0;
	double dt = 0.0;

	// Spacing of the unpadded transform, 2 pi / (series_length dt).
	double resolution() const;
	std::size_t nearest_bin(double omega) const;
	// Scales power so that the bin nearest omega equals value.
	void normalize_at(double omega, double value = 1.0);
};

// d^2<D>/dt^2 (up to the dipole matrix element) at every full-resolution
// sample, evaluated from the equations of motion:
//   u'' = omega0 (-omega0 u + Omega(t) w + sum_n Omega_n W+_n).
std::vector<double> dipole_acceleration(trajectory const& traj, atom_params const& atom, pulse_params const& pulse);

// One-sided |DFT|^2 of the (optionally Hann-windowed) series, zero-padded to
// the next power of two >= pad_factor * length.
power_spectrum_data power_spectrum(std::span<double const> series, double dt, window_kind window,
                                   std::size_t pad_factor = 4);

// Time-domain energy recovered from the one-sided bins (two-sided Parseval
// sum divided by the transform length).
double parseval_energy(power_spectrum_data const& s);

// Final photon-number distribution viewed as a spectrum over mode frequency.
power_spectrum_data photon_distribution_spectrum(mode_grid const& grid, std::span<double const> photons);

struct spectral_peak {
	std::size_t bin = 0;
	double frequency = 0.0; // parabolic interpolation in log power
	double height = 0.0;
};

// Local maxima above threshold * max(power).
std::vector<spectral_peak> find_peaks(power_spectrum_data const& s, double relative_threshold = 1e-6);

struct peak_match {
	double frequency_a = 0.0;
	double frequency_b = 0.0;
	double offset = 0.0;       // frequency_b - frequency_a
	double height_ratio = 0.0; // scaled b / a
};

struct comparison_report {
	double ref_frequency = 0.0;
	double scale = 1.0; // factor applied to b
	std::vector<peak_match> peaks;

	double max_abs_offset() const;
	void write(std::ostream& out, double unit = 1.0) const;
};

// Rescales b to agree with a at the bin nearest ref_frequency and pairs every
// peak of a with the closest peak of b.
comparison_report compare_spectra(power_spectrum_data const& a, power_spectrum_data const& b, double ref_frequency,
                                  double relative_threshold = 1e-6);

struct sinusoid_fit {
	double frequency = 0.0;
	double offset = 0.0;
	double amplitude = 0.0;
	double rms_residual = 0.0;
};

// Least-squares fit of a + b cos(omega t) + c sin(omega t), omega searched in
// [omega_lo, omega_hi].
sinusoid_fit fit_sinusoid(std::span<double const> t, std::span<double const> y, double omega_lo, double omega_hi);

} // namespace hhg

#endif
