#include <hhg/model.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hhg {

atom_params::atom_params(double omega0_) : omega0(omega0_) {
	if (!(omega0 > 0.0)) throw std::invalid_argument("omega0 must be positive");
}

pulse_params::pulse_params(double e0_strength_, double nu_, double tau_, envelope_kind env)
    : e0_strength(e0_strength_), nu(nu_), tau(tau_), envelope(env) {
	if (!(nu > 0.0)) throw std::invalid_argument("carrier frequency nu must be positive");
	if (!(tau > 0.0)) throw std::invalid_argument("pulse duration tau must be positive");
	if (!std::isfinite(e0_strength)) throw std::invalid_argument("drive strength must be finite");
	if (auto const* ramp = std::get_if<envelope::flat_top_ramp>(&envelope)) {
		if (!(ramp->ramp_cycles >= 0.0)) throw std::invalid_argument("ramp_cycles must be non-negative");
		// small slack so that tau given in whole cycles is not rejected by rounding
		if (2.0 * ramp->ramp_cycles * period() > tau * (1.0 + 1e-12))
			throw std::invalid_argument("flat-top ramps longer than the pulse: 2*ramp_cycles*T > tau");
	}
}

namespace {

double sin2(double x) {
	double const s = std::sin(x);
	return s * s;
}

struct shape_visitor {
	pulse_params const& p;
	double t;

	double operator()(envelope::sin2) const {
		return sin2(std::numbers::pi * t / p.tau) * std::cos(p.nu * t);
	}

	double operator()(envelope::flat_top_ramp const& env) const {
		double const ramp = env.ramp_cycles * p.period();
		double amp = 1.0;
		if (ramp > 0.0) {
			if (t < ramp) amp = sin2(0.5 * std::numbers::pi * t / ramp);
			else if (t > p.tau - ramp) amp = sin2(0.5 * std::numbers::pi * (p.tau - t) / ramp);
		}
		return amp * std::sin(p.nu * t);
	}

	double operator()(envelope::pure_sine) const { return std::sin(p.nu * t); }
};

} // namespace

double evaluate_pulse(pulse_params const& p, double t) {
	if (!(t > 0.0 && t < p.tau)) return 0.0;
	return p.e0_strength * std::visit(shape_visitor{p, t}, p.envelope);
}

mode_grid::mode_grid(std::vector<double> frequencies, std::vector<double> couplings)
    : frequencies_(std::move(frequencies)), couplings_(std::move(couplings)) {
	if (frequencies_.empty()) throw std::invalid_argument("mode grid needs at least one mode");
	if (frequencies_.size() != couplings_.size())
		throw std::invalid_argument("mode grid: frequencies and couplings differ in length");
	for (std::size_t n = 0; n < frequencies_.size(); ++n) {
		if (!(frequencies_[n] > 0.0))
			throw std::invalid_argument("mode grid: frequency " + std::to_string(n) + " is not positive");
		if (n > 0 && !(frequencies_[n] > frequencies_[n - 1]))
			throw std::invalid_argument("mode grid: frequencies must be strictly increasing");
		if (!(couplings_[n] >= 0.0) || !std::isfinite(couplings_[n]))
			throw std::invalid_argument("mode grid: coupling " + std::to_string(n) + " is negative");
	}
}

std::size_t mode_grid::nearest(double omega) const {
	auto const it = std::lower_bound(frequencies_.begin(), frequencies_.end(), omega);
	if (it == frequencies_.begin()) return 0;
	if (it == frequencies_.end()) return frequencies_.size() - 1;
	auto const hi = static_cast<std::size_t>(it - frequencies_.begin());
	return (omega - frequencies_[hi - 1] <= frequencies_[hi] - omega) ? hi - 1 : hi;
}

mode_grid build_mode_grid(std::size_t n_modes, double omega_max, double coupling_scale, double omega0) {
	if (n_modes == 0) throw std::invalid_argument("build_mode_grid: n_modes must be at least 1");
	if (!(omega_max > 0.0)) throw std::invalid_argument("build_mode_grid: omega_max must be positive");
	if (!(coupling_scale >= 0.0)) throw std::invalid_argument("build_mode_grid: coupling_scale must be >= 0");
	if (!(omega0 > 0.0)) throw std::invalid_argument("build_mode_grid: omega0 must be positive");

	double const spacing = omega_max / static_cast<double>(n_modes);
	std::vector<double> freq(n_modes), coupling(n_modes);
	for (std::size_t n = 0; n < n_modes; ++n) {
		freq[n] = spacing * static_cast<double>(n + 1);
		coupling[n] = coupling_scale * omega0 * std::sqrt(freq[n] / omega0);
	}
	return mode_grid(std::move(freq), std::move(coupling));
}

} // namespace hhg
