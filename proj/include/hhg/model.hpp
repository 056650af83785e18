#ifndef HHG_MODEL_HPP
#define HHG_MODEL_HPP

#include <numbers>
#include <span>
#include <variant>
#include <vector>

namespace hhg {

// Units: hbar = 1. Frequencies are angular frequencies; the atom's omega0
// sets the scale (omega0 = 1 in every preset).

struct atom_params {
	double omega0 = 1.0;

	explicit atom_params(double omega0_ = 1.0);
};

namespace envelope {

struct sin2 {};

// sin^2-shaped rise and fall of ramp_cycles carrier periods each, unit
// plateau in between. Carrier is sin(nu t) so the plateau matches the
// periodic drive used by the Floquet analysis.
struct flat_top_ramp {
	double ramp_cycles = 5.0;
};

// E0 sin(nu t) switched on at t = 0 and off at t = tau.
struct pure_sine {};

} // namespace envelope

using envelope_kind = std::variant<envelope::sin2, envelope::flat_top_ramp, envelope::pure_sine>;

struct pulse_params {
	double e0_strength; // peak Omega(t), i.e. d E0 / hbar
	double nu;          // carrier angular frequency
	double tau;         // total duration
	envelope_kind envelope;

	pulse_params(double e0_strength_, double nu_, double tau_, envelope_kind env = envelope::sin2{});

	double period() const { return 2.0 * std::numbers::pi / nu; }
};

// Drive strength Omega(t) entering H_ex = -(Omega(t)/2) sigma_x.
// Identically zero outside [0, tau].
double evaluate_pulse(pulse_params const& p, double t);

class mode_grid {
public:
	mode_grid(std::vector<double> frequencies, std::vector<double> couplings);

	std::span<double const> frequencies() const { return frequencies_; }
	std::span<double const> couplings() const { return couplings_; }
	std::size_t size() const { return frequencies_.size(); }

	// Index of the mode whose frequency is closest to omega.
	std::size_t nearest(double omega) const;

private:
	std::vector<double> frequencies_;
	std::vector<double> couplings_;
};

// Uniform grid on (0, omega_max] with spacing omega_max / n_modes, first mode
// one spacing above zero. Couplings follow
//   Omega_n = coupling_scale * omega0 * sqrt(omega_n / omega0).
mode_grid build_mode_grid(std::size_t n_modes, double omega_max, double coupling_scale, double omega0);

} // namespace hhg

#endif
