#ifndef HHG_FOCK_HPP
#define HHG_FOCK_HPP

#include <hhg/meanfield.hpp>
#include <hhg/model.hpp>

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace hhg {

using cplx = std::complex<double>;

// Threshold below which <N> is treated as zero for Q_M and g2.
constexpr double q_floor = 1e-12;

struct fock_mode {
	double frequency = 0.0;
	double coupling = 0.0;
};

// Truncated basis |n_1 (, n_2), a> with n_i in [0, M] and a in {e, g}.
// Flat index: ((n_1 (M+1) + n_2) * 2 + a), a = 0 for |e>, 1 for |g>.
class fock_space {
public:
	fock_space(std::size_t n_modes, std::size_t m_max);

	std::size_t n_modes() const { return n_modes_; }
	std::size_t m_max() const { return m_max_; }
	std::size_t dimension() const { return dim_; }
	std::size_t levels() const { return m_max_ + 1; }

	std::size_t index(std::array<std::size_t, 2> n, std::size_t atom) const;
	// photon number of mode i in basis state `index`
	std::size_t photons(std::size_t index, std::size_t mode) const;
	std::size_t atom_level(std::size_t index) const { return index % 2; }

private:
	std::size_t n_modes_;
	std::size_t m_max_;
	std::size_t dim_;
};

struct fock_state {
	fock_space space;
	std::vector<fock_mode> modes;
	std::vector<cplx> amplitudes;

	double norm() const;
	// sum of |amplitude|^2 over basis states with some n_i = M
	double edge_population() const;
};

// |photons> (x) (c_e |e> + c_g |g>) for independent per-mode amplitude vectors
// of length M+1 (normalized in place).
fock_state make_product_state(fock_space const& space, std::vector<fock_mode> const& modes,
                              std::vector<std::vector<cplx>> const& mode_amplitudes, std::array<cplx, 2> atom);

fock_state vacuum_ground(fock_space const& space, std::vector<fock_mode> const& modes);

// Number state |n> truncated at M, and a coherent state with amplitude alpha
// truncated and renormalized.
std::vector<cplx> number_amplitudes(std::size_t m_max, std::size_t n);
std::vector<cplx> coherent_amplitudes(std::size_t m_max, cplx alpha);

// out = H psi with
//   H = (omega0/2) sigma_z + sum_i w_i a_i^+ a_i + sum_i (Omega_i/2)(a_i + a_i^+) sigma_x - (Omega(t)/2) sigma_x.
void apply_hamiltonian(fock_space const& space, std::span<fock_mode const> modes, atom_params const& atom,
                       double drive, std::span<cplx const> psi, std::span<cplx> out);

// Dense matrix of the same operator; intended as a check for small M.
Eigen::MatrixXcd hamiltonian_matrix(fock_space const& space, std::span<fock_mode const> modes,
                                    atom_params const& atom, double drive);

struct fock_history {
	std::vector<double> times;
	std::vector<fock_state> states;
	double max_norm_drift = 0.0;
	double max_edge_population = 0.0;
	std::size_t steps = 0;
	double dt = 0.0;
};

struct evolve_options {
	double t_end = 0.0;
	double dt = 0.0;           // 0 selects min(T, 2 pi / w_max, 2 pi / omega0) / 200
	std::size_t sample_every = 1;
	double edge_abort = 1e-6;  // truncation-edge population that aborts the run
};

// Largest allowed step, min(T, 2 pi / w_max) / 200.
double max_fock_step(pulse_params const& pulse, std::span<fock_mode const> modes);

// RK4 in the Schroedinger picture without renormalization. Throws
// numerical_error when the edge population exceeds options.edge_abort or the
// state becomes non-finite.
fock_history evolve(fock_state const& initial, pulse_params const& pulse, atom_params const& atom,
                    evolve_options const& options);

struct photon_stats {
	std::vector<double> distribution; // P_n, traced over the atom and the other mode
	double mean = 0.0;
	double mean_square = 0.0;
	double factorial_moment = 0.0;    // <N (N-1)>
	std::optional<double> mandel_q;   // empty when <N> <= q_floor
};

photon_stats photon_statistics(fock_state const& state, std::size_t mode);

// Equal-time g2_ij = <N_i N_j> / (<N_i><N_j>); the self case uses the
// normal-ordered numerator <a^+ a^+ a a>. Empty when a mean is <= q_floor.
std::optional<double> g2_equal_time(fock_state const& state, std::size_t i, std::size_t j);
// Same with the literal <N_i N_i> numerator for i == j.
std::optional<double> g2_equal_time_literal(fock_state const& state, std::size_t i, std::size_t j);

enum class pauli { x, y, z };

// <psi| A * prod(ops) |psi> where ops are (mode, is_creation), applied right to left.
cplx atom_mode_expectation(fock_state const& state, std::optional<pauli> atom_op,
                           std::span<std::pair<std::size_t, bool> const> mode_ops);

struct audit_report {
	std::size_t samples = 0;
	double max_ratio = 0.0;         // max over samples of neglected / kept
	double max_ratio_time = 0.0;
	double max_neglected = 0.0;
	double min_kept = 0.0;
	double max_factorization_error = 0.0; // |<A N_i> - <A><N_i>| / (<N_i> max|<A>|), seeded modes
	bool degenerate_modes = false;
	std::vector<double> ratio_series;

	void write(std::ostream& out) const;
};

// Checks the cross-correlation terms dropped by the factorized equations on
// a two-mode history: |<A a_i a_j>|, |<A a_i^+ a_j^+>| (all i, j) and
// |<A a_i^+ a_j>| (i != j) against the kept |<A (2 N_i + 1)>|, A in
// {sigma_x, sigma_y, sigma_z}.
audit_report cross_term_audit(fock_history const& history,
                              std::function<void(std::string_view)> const& warn = {});

} // namespace hhg

#endif
