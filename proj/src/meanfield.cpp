#include <hhg/meanfield.hpp>
#include <hhg/numerics.hpp>

#include <array>
#include <cmath>
#include <iostream>
#include <sstream>

namespace hhg {

meanfield_state::meanfield_state(std::size_t n_modes) : n_modes_(n_modes), data_(3 + 7 * n_modes, 0.0) {}

meanfield_state meanfield_state::ground(std::size_t n_modes) {
	meanfield_state s(n_modes);
	s.w() = -1.0;
	return s;
}

meanfield_state meanfield_state::excited(std::size_t n_modes) {
	meanfield_state s(n_modes);
	s.w() = 1.0;
	return s;
}

std::string meanfield_state::variable_name(std::size_t index) const {
	static constexpr std::array<char const*, 3> atomic{"u", "v", "w"};
	static constexpr std::array<char const*, 7> blocks{"U+", "U-", "V+", "V-", "W+", "W-", "N"};
	if (index < 3) return atomic[index];
	if (index >= data_.size() || n_modes_ == 0) return "?";
	auto const rel = index - 3;
	return std::string(blocks[rel / n_modes_]) + "[" + std::to_string(rel % n_modes_) + "]";
}

meanfield_system::meanfield_system(pulse_params const& pulse, mode_grid const& grid, atom_params const& atom)
    : pulse_(pulse), grid_(grid), atom_(atom), scratch_(grid.size()) {}

double meanfield_system::field_feedback(std::span<double const> state) {
	auto const n = grid_.size();
	auto const coupling = grid_.couplings();
	auto const wp = state.subspan(3 + meanfield_state::w_plus_block * n, n);
	for (std::size_t i = 0; i < n; ++i) scratch_[i] = coupling[i] * wp[i];
	return pairwise_sum(scratch_);
}

void meanfield_system::operator()(std::span<double const> x, std::span<double> dx, double t) {
	auto const n = grid_.size();
	if (x.size() != dimension() || dx.size() != dimension())
		throw std::invalid_argument("meanfield derivatives: state dimension does not match the mode grid");

	double const w0 = atom_.omega0;
	double const drive = evaluate_pulse(pulse_, t);
	double const u = x[0], v = x[1], w = x[2];

	auto const freq = grid_.frequencies();
	auto const coupling = grid_.couplings();
	auto block = [&](auto& arr, meanfield_state::block b) { return arr.subspan(3 + b * n, n); };
	auto const up = block(x, meanfield_state::u_plus_block);
	auto const um = block(x, meanfield_state::u_minus_block);
	auto const vp = block(x, meanfield_state::v_plus_block);
	auto const vm = block(x, meanfield_state::v_minus_block);
	auto const wp = block(x, meanfield_state::w_plus_block);
	auto const wm = block(x, meanfield_state::w_minus_block);
	auto const np = block(x, meanfield_state::photons_block);
	auto dup = block(dx, meanfield_state::u_plus_block);
	auto dum = block(dx, meanfield_state::u_minus_block);
	auto dvp = block(dx, meanfield_state::v_plus_block);
	auto dvm = block(dx, meanfield_state::v_minus_block);
	auto dwp = block(dx, meanfield_state::w_plus_block);
	auto dwm = block(dx, meanfield_state::w_minus_block);
	auto dnp = block(dx, meanfield_state::photons_block);

	for (std::size_t i = 0; i < n; ++i) {
		double const om = freq[i];
		double const g = coupling[i];
		double const occupation = 2.0 * np[i] + 1.0;
		dup[i] = w0 * vp[i] - om * um[i];
		dum[i] = w0 * vm[i] + om * up[i] + g;
		dvp[i] = -w0 * up[i] - om * vm[i] + drive * wp[i] + w * g * occupation;
		dvm[i] = -w0 * um[i] + om * vp[i] + drive * wm[i];
		dwp[i] = -om * wm[i] - drive * vp[i] - v * g * occupation;
		dwm[i] = om * wp[i] - drive * vm[i];
		dnp[i] = 0.5 * g * um[i];
	}

	for (std::size_t i = 0; i < n; ++i) scratch_[i] = coupling[i] * wp[i];
	double const sum_w = pairwise_sum(scratch_);
	for (std::size_t i = 0; i < n; ++i) scratch_[i] = coupling[i] * vp[i];
	double const sum_v = pairwise_sum(scratch_);

	dx[0] = w0 * v;
	dx[1] = -w0 * u + drive * w + sum_w;
	dx[2] = -drive * v - sum_v;
}

meanfield_state derivatives(meanfield_state const& s, double t, pulse_params const& pulse, mode_grid const& grid,
                            atom_params const& atom) {
	if (s.n_modes() != grid.size())
		throw std::invalid_argument("meanfield derivatives: state has " + std::to_string(s.n_modes()) +
		                            " modes, grid has " + std::to_string(grid.size()));
	meanfield_system system(pulse, grid, atom);
	meanfield_state out(s.n_modes());
	system(s.raw(), out.raw(), t);
	return out;
}

double clamp_photon_number(double n) { return (n < 0.0 && n >= -photon_tolerance) ? 0.0 : n; }

namespace {

void check_finite(std::span<double const> x, double t, meanfield_state const& layout) {
	for (std::size_t i = 0; i < x.size(); ++i) {
		if (!std::isfinite(x[i])) {
			std::ostringstream msg;
			msg << "non-finite value in mean-field state at t = " << t << " (variable " << i << ", "
			    << layout.variable_name(i) << ")";
			throw numerical_error(msg.str(), t, i);
		}
	}
}

// Bare two-level Bloch equations under the same pulse, for the validity monitor.
struct free_bloch {
	pulse_params const& pulse;
	double omega0;

	void operator()(std::span<double const> x, std::span<double> dx, double t) const {
		double const drive = evaluate_pulse(pulse, t);
		dx[0] = omega0 * x[1];
		dx[1] = -omega0 * x[0] + drive * x[2];
		dx[2] = -drive * x[1];
	}
};

} // namespace

trajectory integrate(meanfield_state const& initial, pulse_params const& pulse, mode_grid const& grid,
                     atom_params const& atom, integrate_options const& options) {
	if (initial.n_modes() != grid.size())
		throw std::invalid_argument("integrate: initial state does not match the mode grid");
	if (!(options.dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
	if (!(options.t_end >= 0.0)) throw std::invalid_argument("integrate: t_end must be non-negative");
	if (options.stride == 0) throw std::invalid_argument("integrate: stride must be at least 1");

	auto const steps = static_cast<std::size_t>(std::ceil(options.t_end / options.dt - 1e-9));
	double const dt = steps > 0 ? options.t_end / static_cast<double>(steps) : options.dt;

	meanfield_system system(pulse, grid, atom);
	meanfield_state state = initial;
	rk4_stepper<double> stepper(state.dimension());

	std::array<double, 3> bloch{initial.u(), initial.v(), initial.w()};
	rk4_stepper<double> bloch_stepper(3);
	free_bloch bare{pulse, atom.omega0};

	trajectory traj;
	traj.dt = dt;
	traj.steps = steps;
	traj.dipole_series.reserve(steps + 1);
	traj.inversion_series.reserve(steps + 1);
	traj.feedback_series.reserve(steps + 1);
	traj.states.reserve(steps / options.stride + 2);
	traj.times.reserve(steps / options.stride + 2);

	auto record = [&](std::size_t k) {
		traj.dipole_series.push_back(state.u());
		traj.inversion_series.push_back(state.w());
		traj.feedback_series.push_back(system.field_feedback(state.raw()));
		if (k % options.stride == 0 || k == steps) {
			traj.times.push_back(dt * static_cast<double>(k));
			traj.states.push_back(state);
		}
	};

	check_finite(state.raw(), 0.0, state);
	record(0);
	for (std::size_t k = 0; k < steps; ++k) {
		double const t = dt * static_cast<double>(k);
		stepper.step(system, state.raw(), t, dt);
		check_finite(state.raw(), t + dt, state);

		if (options.monitor_validity) {
			bloch_stepper.step(bare, std::span<double>(bloch), t, dt);
			double const dev = std::abs(state.w() - bloch[2]);
			if (dev > traj.max_free_deviation) traj.max_free_deviation = dev;
			if (dev > options.validity_threshold && !traj.validity_warning) {
				traj.validity_warning = true;
				std::ostringstream msg;
				msg << "quantized modes perturb the atom (|w - w_free| = " << dev << " at t = " << t + dt
				    << "); the weak-coupling regime no longer holds";
				if (options.warn) options.warn(msg.str());
				else std::cerr << "warning: " << msg.str() << '\n';
			}
		}
		record(k + 1);
	}
	return traj;
}

spectrogram_data spectrogram(trajectory const& traj, mode_grid const& grid, double nu) {
	if (traj.states.size() < 2) throw std::invalid_argument("spectrogram: need at least two snapshots");
	if (traj.states.front().n_modes() != grid.size())
		throw std::invalid_argument("spectrogram: trajectory does not match the mode grid");

	double const period = 2.0 * std::numbers::pi / nu;
	spectrogram_data out;
	out.rows = traj.states.size();
	out.cols = grid.size();
	out.time_cycles.reserve(out.rows);
	for (double t : traj.times) out.time_cycles.push_back(t / period);
	out.freq_over_nu.reserve(out.cols);
	for (double f : grid.frequencies()) out.freq_over_nu.push_back(f / nu);
	out.values.reserve(out.rows * out.cols);
	for (auto const& s : traj.states)
		for (double n : s.n_exp()) out.values.push_back(clamp_photon_number(n));
	return out;
}

} // namespace hhg
