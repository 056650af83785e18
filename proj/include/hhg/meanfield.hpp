#ifndef HHG_MEANFIELD_HPP
#define HHG_MEANFIELD_HPP

#include <hhg/model.hpp>

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hhg {

// Raised when integration produces NaN/Inf or a solver leaves its domain of
// validity in a way that makes further output meaningless.
class numerical_error : public std::runtime_error {
public:
	numerical_error(std::string const& what, double time, std::size_t index)
	    : std::runtime_error(what), time_(time), index_(index) {}

	double time() const { return time_; }
	std::size_t index() const { return index_; }

private:
	double time_;
	std::size_t index_;
};

// The 7N+3 real variables of the factorized expectation-value equations.
// Storage is structure-of-arrays: [u v w | U+ | U- | V+ | V- | W+ | W- | <N>].
class meanfield_state {
public:
	enum block : std::size_t { u_plus_block, u_minus_block, v_plus_block, v_minus_block, w_plus_block, w_minus_block, photons_block };

	explicit meanfield_state(std::size_t n_modes);

	static meanfield_state ground(std::size_t n_modes);
	static meanfield_state excited(std::size_t n_modes);

	std::size_t n_modes() const { return n_modes_; }
	std::size_t dimension() const { return data_.size(); }

	double& u() { return data_[0]; }
	double& v() { return data_[1]; }
	double& w() { return data_[2]; }
	double u() const { return data_[0]; }
	double v() const { return data_[1]; }
	double w() const { return data_[2]; }

	std::span<double> mode_block(block b) { return {data_.data() + 3 + b * n_modes_, n_modes_}; }
	std::span<double const> mode_block(block b) const { return {data_.data() + 3 + b * n_modes_, n_modes_}; }

	std::span<double> u_plus() { return mode_block(u_plus_block); }
	std::span<double> u_minus() { return mode_block(u_minus_block); }
	std::span<double> v_plus() { return mode_block(v_plus_block); }
	std::span<double> v_minus() { return mode_block(v_minus_block); }
	std::span<double> w_plus() { return mode_block(w_plus_block); }
	std::span<double> w_minus() { return mode_block(w_minus_block); }
	std::span<double> n_exp() { return mode_block(photons_block); }
	std::span<double const> u_plus() const { return mode_block(u_plus_block); }
	std::span<double const> u_minus() const { return mode_block(u_minus_block); }
	std::span<double const> v_plus() const { return mode_block(v_plus_block); }
	std::span<double const> v_minus() const { return mode_block(v_minus_block); }
	std::span<double const> w_plus() const { return mode_block(w_plus_block); }
	std::span<double const> w_minus() const { return mode_block(w_minus_block); }
	std::span<double const> n_exp() const { return mode_block(photons_block); }

	std::span<double> raw() { return data_; }
	std::span<double const> raw() const { return data_; }

	double bloch_length_squared() const { return u() * u() + v() * v() + w() * w(); }

	// Human-readable name of a flat variable index, for diagnostics.
	std::string variable_name(std::size_t index) const;

	bool operator==(meanfield_state const&) const = default;

private:
	std::size_t n_modes_;
	std::vector<double> data_;
};

// Right-hand side of the closed expectation-value system. The two feedback
// sums over modes use fixed-order pairwise summation.
class meanfield_system {
public:
	meanfield_system(pulse_params const& pulse, mode_grid const& grid, atom_params const& atom);

	void operator()(std::span<double const> state, std::span<double> dstate, double t);

	std::size_t dimension() const { return 3 + 7 * grid_.size(); }

	// sum_n Omega_n W+_n of a flat state vector
	double field_feedback(std::span<double const> state);

	pulse_params const& pulse() const { return pulse_; }
	mode_grid const& grid() const { return grid_; }
	atom_params const& atom() const { return atom_; }

private:
	pulse_params pulse_;
	mode_grid grid_;
	atom_params atom_;
	std::vector<double> scratch_;
};

meanfield_state derivatives(meanfield_state const& s, double t, pulse_params const& pulse, mode_grid const& grid,
                            atom_params const& atom);

struct integrate_options {
	double t_end = 0.0;
	double dt = 0.0;
	std::size_t stride = 50;
	// Compare w(t) against a zero-coupling run of the same pulse and warn
	// once the difference exceeds the threshold.
	bool monitor_validity = true;
	double validity_threshold = 1e-3;
	std::function<void(std::string_view)> warn;
};

struct trajectory {
	double dt = 0.0;
	std::size_t steps = 0;
	std::vector<double> times;
	std::vector<meanfield_state> states;
	// Full-resolution samples at t_k = k dt, k = 0..steps.
	std::vector<double> dipole_series;   // u
	std::vector<double> inversion_series; // w
	std::vector<double> feedback_series; // sum_n Omega_n W+_n
	double max_free_deviation = 0.0;
	bool validity_warning = false;

	double sample_time(std::size_t k) const { return dt * static_cast<double>(k); }
	meanfield_state const& final_state() const { return states.back(); }
};

// Fixed-step RK4. The number of steps is ceil(t_end / dt) and the step is
// shrunk so the run ends exactly at t_end. Snapshots are taken at t = 0,
// every `stride` steps and at t_end.
trajectory integrate(meanfield_state const& initial, pulse_params const& pulse, mode_grid const& grid,
                     atom_params const& atom, integrate_options const& options);

constexpr double photon_tolerance = 1e-12;

// <N_n> with excursions in [-photon_tolerance, 0) mapped to zero.
double clamp_photon_number(double n);

struct spectrogram_data {
	std::size_t rows = 0; // snapshots
	std::size_t cols = 0; // modes
	std::vector<double> time_cycles;   // t / T
	std::vector<double> freq_over_nu;  // omega_n / nu
	std::vector<double> values;        // row-major <N_n>

	double at(std::size_t row, std::size_t col) const { return values[row * cols + col]; }
};

spectrogram_data spectrogram(trajectory const& traj, mode_grid const& grid, double nu);

} // namespace hhg

#endif
