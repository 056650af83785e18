#ifndef HHG_FLOQUET_HPP
#define HHG_FLOQUET_HPP

#include <hhg/model.hpp>

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <vector>

namespace hhg {

using cplx = std::complex<double>;
using cmat2 = Eigen::Matrix2cd;
using cvec2 = Eigen::Vector2cd;

// Two-level basis ordering used throughout the Floquet code: index 0 is the
// excited state |e> (sigma_z = +1), index 1 the ground state |g>.
inline cvec2 excited_state() { return cvec2(1.0, 0.0); }
inline cvec2 ground_state() { return cvec2(0.0, 1.0); }

// Propagates a 2-vector under H'(t) = (omega0/2) sigma_z - (e0 sin(nu t)/2) sigma_x
// from t0 to t1 in `steps` RK4 steps.
cvec2 propagate_driven_atom(atom_params const& atom, double e0_strength, double nu, cvec2 psi, double t0, double t1,
                            std::size_t steps);

// One-period propagator of the sine-driven atom (quantized modes neglected).
cmat2 monodromy(atom_params const& atom, double e0_strength, double nu, std::size_t steps_per_period = 4000);

struct floquet_result {
	cmat2 monodromy;
	double nu = 0.0;
	// Folded into (-nu/2, nu/2], ascending.
	std::array<double, 2> quasi_energies{};
	// Smallest distance between the two nonequivalent quasi-energy classes,
	// in [0, nu/2].
	double delta_epsilon = 0.0;
	std::array<cvec2, 2> floquet_states_t0;
};

// Quasi-energies eps_k = -arg(lambda_k) / T of a unitary one-period propagator.
// Throws std::domain_error when m is not unitary to 1e-8.
floquet_result quasienergies(cmat2 const& m, double nu);

floquet_result floquet_analysis(atom_params const& atom, double e0_strength, double nu);

struct delta_epsilon_grid {
	std::vector<double> e0_over_omega0;       // rows
	std::vector<double> detuning_over_omega0; // columns, Delta = omega0 - nu
	std::vector<double> values;               // delta_epsilon / nu, row-major

	double at(std::size_t row, std::size_t col) const { return values[row * detuning_over_omega0.size() + col]; }
};

// delta_epsilon / nu on the Cartesian grid (drive amplitude x detuning).
// Rows are evaluated on up to `threads` workers; output order is fixed.
delta_epsilon_grid delta_epsilon_map(atom_params const& atom, std::vector<double> const& e0_over_omega0,
                                     std::vector<double> const& detuning_over_omega0, unsigned threads = 1);

struct spectral_line {
	enum class kind { harmonic, sideband };

	double frequency = 0.0;
	double weight = 0.0;
	kind type = kind::harmonic;
	int order = 0;  // nearest harmonic m
	int side = 0;   // +1 / -1 for sidebands, 0 for harmonics
	bool merged = false; // sidebands of degenerate quasi-energies coincide

	std::string label() const;
};

struct line_spectrum {
	double nu = 0.0;
	double delta_epsilon = 0.0;
	cplx alpha, beta;
	std::vector<spectral_line> lines; // ascending frequency
	// Fourier coefficients over one period of the periodic parts of
	// <phi_1|D|phi_1>, <phi_2|D|phi_2> and <phi_2|D|phi_1>; index m + max_order.
	std::vector<cplx> diag1, diag2, cross;
	int max_order = 0;

	cplx coefficient(std::vector<cplx> const& c, int m) const { return c[static_cast<std::size_t>(m + max_order)]; }
};

struct line_spectrum_options {
	std::size_t samples = 4096;
	int max_order = 60;
	// Extra multiples of nu added to the quasi-energies before the
	// decomposition; the physical lines must not depend on them.
	std::array<int, 2> representative_shift{0, 0};
};

// HHG line positions and weights predicted from the Floquet states. Weights
// are squared amplitudes times frequency^4 (acceleration power).
line_spectrum floquet_line_spectrum(atom_params const& atom, double e0_strength, double nu, cvec2 const& initial,
                                    line_spectrum_options const& options = {});

} // namespace hhg

#endif
