#include <hhg/fock.hpp>
#include <hhg/numerics.hpp>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace hhg {

fock_space::fock_space(std::size_t n_modes, std::size_t m_max) : n_modes_(n_modes), m_max_(m_max) {
	if (n_modes != 1 && n_modes != 2) throw std::invalid_argument("fock_space: one or two modes supported");
	if (m_max == 0) throw std::invalid_argument("fock_space: truncation M must be at least 1");
	dim_ = 2 * (n_modes == 1 ? levels() : levels() * levels());
}

std::size_t fock_space::index(std::array<std::size_t, 2> n, std::size_t atom) const {
	std::size_t const photon_index = n_modes_ == 1 ? n[0] : n[0] * levels() + n[1];
	return photon_index * 2 + atom;
}

std::size_t fock_space::photons(std::size_t index, std::size_t mode) const {
	std::size_t const photon_index = index / 2;
	if (n_modes_ == 1) return photon_index;
	return mode == 0 ? photon_index / levels() : photon_index % levels();
}

double fock_state::norm() const {
	double s = 0.0;
	for (auto const& a : amplitudes) s += std::norm(a);
	return std::sqrt(s);
}

double fock_state::edge_population() const {
	double s = 0.0;
	for (std::size_t k = 0; k < amplitudes.size(); ++k) {
		bool edge = false;
		for (std::size_t i = 0; i < space.n_modes(); ++i) edge = edge || space.photons(k, i) == space.m_max();
		if (edge) s += std::norm(amplitudes[k]);
	}
	return s;
}

namespace {

void check_modes(fock_space const& space, std::span<fock_mode const> modes) {
	if (modes.size() != space.n_modes()) throw std::invalid_argument("fock: mode list does not match the basis");
	for (auto const& m : modes)
		if (!(m.frequency > 0.0) || !(m.coupling >= 0.0)) throw std::invalid_argument("fock: invalid mode parameters");
}

} // namespace

fock_state make_product_state(fock_space const& space, std::vector<fock_mode> const& modes,
                              std::vector<std::vector<cplx>> const& mode_amplitudes, std::array<cplx, 2> atom) {
	check_modes(space, modes);
	if (mode_amplitudes.size() != space.n_modes())
		throw std::invalid_argument("make_product_state: need one amplitude vector per mode");
	for (auto const& a : mode_amplitudes)
		if (a.size() != space.levels()) throw std::invalid_argument("make_product_state: amplitude vector length != M+1");

	fock_state s{space, modes, std::vector<cplx>(space.dimension())};
	std::size_t const n2 = space.n_modes() == 2 ? space.levels() : 1;
	for (std::size_t i = 0; i < space.levels(); ++i)
		for (std::size_t j = 0; j < n2; ++j)
			for (std::size_t a = 0; a < 2; ++a) {
				cplx amp = mode_amplitudes[0][i] * atom[a];
				if (space.n_modes() == 2) amp *= mode_amplitudes[1][j];
				s.amplitudes[space.index({i, j}, a)] = amp;
			}
	double const nrm = s.norm();
	if (!(nrm > 0.0)) throw std::invalid_argument("make_product_state: zero state");
	for (auto& a : s.amplitudes) a /= nrm;
	return s;
}

fock_state vacuum_ground(fock_space const& space, std::vector<fock_mode> const& modes) {
	std::vector<std::vector<cplx>> amps(space.n_modes(), number_amplitudes(space.m_max(), 0));
	return make_product_state(space, modes, amps, {0.0, 1.0});
}

std::vector<cplx> number_amplitudes(std::size_t m_max, std::size_t n) {
	if (n > m_max) throw std::invalid_argument("number_amplitudes: n exceeds truncation");
	std::vector<cplx> a(m_max + 1);
	a[n] = 1.0;
	return a;
}

std::vector<cplx> coherent_amplitudes(std::size_t m_max, cplx alpha) {
	std::vector<cplx> a(m_max + 1);
	cplx term = std::exp(-0.5 * std::norm(alpha));
	double s = 0.0;
	for (std::size_t n = 0; n <= m_max; ++n) {
		a[n] = term;
		s += std::norm(term);
		term *= alpha / std::sqrt(static_cast<double>(n + 1));
	}
	for (auto& x : a) x /= std::sqrt(s);
	return a;
}

void apply_hamiltonian(fock_space const& space, std::span<fock_mode const> modes, atom_params const& atom,
                       double drive, std::span<cplx const> psi, std::span<cplx> out) {
	auto const levels = space.levels();
	auto const m_max = space.m_max();
	double const half_w0 = 0.5 * atom.omega0;
	double const half_drive = 0.5 * drive;
	std::size_t const n2_levels = space.n_modes() == 2 ? levels : 1;
	// photon-index stride of each mode
	std::array<std::size_t, 2> const stride{n2_levels, 1};

	for (std::size_t i = 0; i < levels; ++i) {
		for (std::size_t j = 0; j < n2_levels; ++j) {
			std::array<std::size_t, 2> const n{i, j};
			std::size_t const p = i * n2_levels + j;
			double diag = 0.0;
			for (std::size_t m = 0; m < space.n_modes(); ++m) diag += modes[m].frequency * static_cast<double>(n[m]);
			for (std::size_t a = 0; a < 2; ++a) {
				std::size_t const k = 2 * p + a;
				std::size_t const flip = 2 * p + (1 - a);
				double const sz = a == 0 ? 1.0 : -1.0;
				cplx acc = (sz * half_w0 + diag) * psi[k] - half_drive * psi[flip];
				for (std::size_t m = 0; m < space.n_modes(); ++m) {
					double const half_g = 0.5 * modes[m].coupling;
					if (n[m] < m_max) // a |n+1> = sqrt(n+1) |n>
						acc += half_g * std::sqrt(static_cast<double>(n[m] + 1)) * psi[2 * (p + stride[m]) + (1 - a)];
					if (n[m] > 0) // a^+ |n-1> = sqrt(n) |n>
						acc += half_g * std::sqrt(static_cast<double>(n[m])) * psi[2 * (p - stride[m]) + (1 - a)];
				}
				out[k] = acc;
			}
		}
	}
}

Eigen::MatrixXcd hamiltonian_matrix(fock_space const& space, std::span<fock_mode const> modes,
                                    atom_params const& atom, double drive) {
	check_modes(space, modes);
	auto const dim = space.dimension();
	Eigen::MatrixXcd h(dim, dim);
	std::vector<cplx> e(dim), col(dim);
	for (std::size_t c = 0; c < dim; ++c) {
		std::fill(e.begin(), e.end(), cplx{});
		e[c] = 1.0;
		apply_hamiltonian(space, modes, atom, drive, e, col);
		for (std::size_t r = 0; r < dim; ++r) h(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = col[r];
	}
	return h;
}

double max_fock_step(pulse_params const& pulse, std::span<fock_mode const> modes) {
	double w_max = 0.0;
	for (auto const& m : modes) w_max = std::max(w_max, m.frequency);
	double const limit = std::min(pulse.period(), 2.0 * std::numbers::pi / w_max);
	return limit / 200.0;
}

fock_history evolve(fock_state const& initial, pulse_params const& pulse, atom_params const& atom,
                    evolve_options const& options) {
	check_modes(initial.space, initial.modes);
	if (std::abs(initial.norm() - 1.0) > 1e-10) throw std::invalid_argument("evolve: initial state must be normalized");
	if (!(options.t_end >= 0.0)) throw std::invalid_argument("evolve: t_end must be non-negative");
	if (options.sample_every == 0) throw std::invalid_argument("evolve: sample_every must be at least 1");

	double const dt_limit = max_fock_step(pulse, initial.modes);
	double const dt_req =
	    options.dt > 0.0 ? options.dt : std::min(dt_limit, 2.0 * std::numbers::pi / atom.omega0 / 200.0);
	if (dt_req > dt_limit * (1.0 + 1e-12))
		throw std::invalid_argument("evolve: dt exceeds min(T, 2 pi / w_max) / 200");
	auto const steps = static_cast<std::size_t>(std::ceil(options.t_end / dt_req - 1e-9));
	double const dt = steps > 0 ? options.t_end / static_cast<double>(steps) : dt_req;

	fock_state state = initial;
	auto const& space = state.space;
	std::span<fock_mode const> modes = state.modes;
	rk4_stepper<cplx> stepper(space.dimension());
	auto rhs = [&](std::span<cplx const> psi, std::span<cplx> dpsi, double t) {
		apply_hamiltonian(space, modes, atom, evaluate_pulse(pulse, t), psi, dpsi);
		for (auto& x : dpsi) x = cplx(x.imag(), -x.real()); // -i H psi
	};

	fock_history hist;
	hist.steps = steps;
	hist.dt = dt;
	auto sample = [&](std::size_t k) {
		double const t = dt * static_cast<double>(k);
		double const edge = state.edge_population();
		hist.max_edge_population = std::max(hist.max_edge_population, edge);
		hist.max_norm_drift = std::max(hist.max_norm_drift, std::abs(state.norm() - 1.0));
		if (edge > options.edge_abort) {
			std::ostringstream msg;
			msg << "Fock truncation edge population " << edge << " at t = " << t << " exceeds " << options.edge_abort
			    << "; increase M (currently " << space.m_max() << ")";
			throw numerical_error(msg.str(), t, 0);
		}
		hist.times.push_back(t);
		hist.states.push_back(state);
	};

	sample(0);
	for (std::size_t k = 0; k < steps; ++k) {
		double const t = dt * static_cast<double>(k);
		stepper.step(rhs, std::span<cplx>(state.amplitudes), t, dt);
		if (!std::isfinite(std::abs(state.amplitudes[0])) || !std::isfinite(state.norm()))
			throw numerical_error("non-finite Fock amplitudes at t = " + std::to_string(t + dt), t + dt, 0);
		if ((k + 1) % options.sample_every == 0 || k + 1 == steps) sample(k + 1);
	}
	return hist;
}

photon_stats photon_statistics(fock_state const& state, std::size_t mode) {
	if (mode >= state.space.n_modes()) throw std::invalid_argument("photon_statistics: invalid mode index");
	photon_stats st;
	st.distribution.assign(state.space.levels(), 0.0);
	for (std::size_t k = 0; k < state.amplitudes.size(); ++k)
		st.distribution[state.space.photons(k, mode)] += std::norm(state.amplitudes[k]);
	for (std::size_t n = 0; n < st.distribution.size(); ++n) {
		double const p = st.distribution[n];
		double const nd = static_cast<double>(n);
		st.mean += nd * p;
		st.mean_square += nd * nd * p;
		st.factorial_moment += nd * (nd - 1.0) * p;
	}
	// (Var N)/<N> - 1 = (<N(N-1)> - <N>^2)/<N>, avoiding the cancellation
	// of the <N> term when <N> is tiny
	if (st.mean > q_floor) st.mandel_q = (st.factorial_moment - st.mean * st.mean) / st.mean;
	return st;
}

namespace {

// <N_i N_j> with optional normal ordering of the self term
std::optional<double> g2_impl(fock_state const& state, std::size_t i, std::size_t j, bool normal_order) {
	auto const nm = state.space.n_modes();
	if (i >= nm || j >= nm) throw std::invalid_argument("g2_equal_time: invalid mode index");
	double ni = 0.0, nj = 0.0, nij = 0.0;
	for (std::size_t k = 0; k < state.amplitudes.size(); ++k) {
		double const p = std::norm(state.amplitudes[k]);
		auto const a = static_cast<double>(state.space.photons(k, i));
		auto const b = static_cast<double>(state.space.photons(k, j));
		ni += a * p;
		nj += b * p;
		nij += (i == j && normal_order ? a * (a - 1.0) : a * b) * p;
	}
	if (ni <= q_floor || nj <= q_floor) return std::nullopt;
	return nij / (ni * nj);
}

void apply_pauli(pauli op, std::vector<cplx>& psi) {
	for (std::size_t k = 0; k < psi.size(); k += 2) {
		cplx& e = psi[k];
		cplx& g = psi[k + 1];
		switch (op) {
		case pauli::x: std::swap(e, g); break;
		case pauli::y: { // sigma_y = [[0, -i], [i, 0]] in (e, g)
			cplx const ne = cplx(0.0, -1.0) * g;
			cplx const ng = cplx(0.0, 1.0) * e;
			e = ne, g = ng;
			break;
		}
		case pauli::z: g = -g; break;
		}
	}
}

void apply_ladder(fock_space const& space, std::size_t mode, bool creation, std::vector<cplx>& psi) {
	std::vector<cplx> out(psi.size());
	std::size_t const stride = (space.n_modes() == 2 && mode == 0) ? space.levels() : 1;
	for (std::size_t k = 0; k < psi.size(); ++k) {
		auto const n = space.photons(k, mode);
		if (creation) {
			if (n < space.m_max()) out[k + 2 * stride] = std::sqrt(static_cast<double>(n + 1)) * psi[k];
		} else if (n > 0) {
			out[k - 2 * stride] = std::sqrt(static_cast<double>(n)) * psi[k];
		}
	}
	psi.swap(out);
}

} // namespace

std::optional<double> g2_equal_time(fock_state const& state, std::size_t i, std::size_t j) {
	return g2_impl(state, i, j, true);
}

std::optional<double> g2_equal_time_literal(fock_state const& state, std::size_t i, std::size_t j) {
	return g2_impl(state, i, j, false);
}

cplx atom_mode_expectation(fock_state const& state, std::optional<pauli> atom_op,
                           std::span<std::pair<std::size_t, bool> const> mode_ops) {
	std::vector<cplx> phi = state.amplitudes;
	for (auto it = mode_ops.rbegin(); it != mode_ops.rend(); ++it) {
		if (it->first >= state.space.n_modes()) throw std::invalid_argument("atom_mode_expectation: bad mode index");
		apply_ladder(state.space, it->first, it->second, phi);
	}
	if (atom_op) apply_pauli(*atom_op, phi);
	cplx acc{};
	for (std::size_t k = 0; k < phi.size(); ++k) acc += std::conj(state.amplitudes[k]) * phi[k];
	return acc;
}

void audit_report::write(std::ostream& out) const {
	out << "# factorization audit\n";
	out << "samples " << samples << '\n';
	out << "degenerate_modes " << (degenerate_modes ? "yes" : "no") << '\n';
	out << "max_neglected " << max_neglected << '\n';
	out << "min_kept " << min_kept << '\n';
	out << "max_factorization_error " << max_factorization_error << '\n';
	out << "max_ratio_time " << max_ratio_time << '\n';
	out << "max_ratio " << max_ratio << '\n';
}

audit_report cross_term_audit(fock_history const& history, std::function<void(std::string_view)> const& warn) {
	if (history.states.empty()) throw std::invalid_argument("cross_term_audit: empty history");
	auto const& first = history.states.front();
	if (first.space.n_modes() != 2) throw std::invalid_argument("cross_term_audit: needs a two-mode history");

	audit_report rep;
	rep.samples = history.states.size();
	rep.min_kept = std::numeric_limits<double>::infinity();
	if (first.modes[0].frequency == first.modes[1].frequency) {
		rep.degenerate_modes = true;
		std::string const msg = "degenerate mode frequencies; cross terms are not expected to be small";
		if (warn) warn(msg);
		else std::cerr << "warning: " << msg << '\n';
	}

	using op = std::pair<std::size_t, bool>;
	constexpr std::array<pauli, 3> atom_ops{pauli::x, pauli::y, pauli::z};
	std::vector<std::array<op, 2>> neglected;
	for (std::size_t i = 0; i < 2; ++i)
		for (std::size_t j = i; j < 2; ++j) {
			neglected.push_back({op{i, false}, op{j, false}}); // a_i a_j
			neglected.push_back({op{i, true}, op{j, true}});   // a_i^+ a_j^+
		}
	neglected.push_back({op{0, true}, op{1, false}}); // a_1^+ a_2
	neglected.push_back({op{1, true}, op{0, false}});

	rep.ratio_series.reserve(history.states.size());
	for (std::size_t s = 0; s < history.states.size(); ++s) {
		auto const& st = history.states[s];
		double worst = 0.0;
		for (auto const& terms : neglected)
			for (auto a : atom_ops) worst = std::max(worst, std::abs(atom_mode_expectation(st, a, terms)));

		double kept = 0.0;
		std::array<double, 2> mean_n{};
		for (std::size_t i = 0; i < 2; ++i) mean_n[i] = photon_statistics(st, i).mean;
		std::array<double, 3> mean_a{};
		for (std::size_t k = 0; k < 3; ++k) {
			mean_a[k] = atom_mode_expectation(st, atom_ops[k], {}).real();
			for (std::size_t i = 0; i < 2; ++i) {
				std::array<op, 2> const number{op{i, true}, op{i, false}};
				double const a_n = atom_mode_expectation(st, atom_ops[k], number).real();
				kept = std::max(kept, std::abs(2.0 * a_n + mean_a[k]));
			}
		}
		double const max_a = std::max({std::abs(mean_a[0]), std::abs(mean_a[1]), std::abs(mean_a[2])});
		for (std::size_t i = 0; i < 2; ++i) {
			if (mean_n[i] < 0.1) continue; // factorization matters only for populated modes
			std::array<op, 2> const number{op{i, true}, op{i, false}};
			for (std::size_t k = 0; k < 3; ++k) {
				double const a_n = atom_mode_expectation(st, atom_ops[k], number).real();
				double const err = std::abs(a_n - mean_a[k] * mean_n[i]) / (mean_n[i] * max_a);
				rep.max_factorization_error = std::max(rep.max_factorization_error, err);
			}
		}

		double const ratio = kept > 0.0 ? worst / kept : 0.0;
		rep.ratio_series.push_back(ratio);
		rep.max_neglected = std::max(rep.max_neglected, worst);
		rep.min_kept = std::min(rep.min_kept, kept);
		if (ratio > rep.max_ratio) {
			rep.max_ratio = ratio;
			rep.max_ratio_time = history.times[s];
		}
	}
	return rep;
}

} // namespace hhg
