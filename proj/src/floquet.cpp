#include <hhg/floquet.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace hhg {

namespace {

constexpr cplx imag_unit{0.0, 1.0};

// -i H'(t) applied to the columns of x
template <typename M>
M schroedinger_rhs(double omega0, double drive, M const& x) {
	M out(x.rows(), x.cols());
	double const half_w = 0.5 * omega0;
	double const half_d = 0.5 * drive;
	for (Eigen::Index c = 0; c < x.cols(); ++c) {
		cplx const e = x(0, c), g = x(1, c);
		out(0, c) = -imag_unit * (half_w * e - half_d * g);
		out(1, c) = -imag_unit * (-half_d * e - half_w * g);
	}
	return out;
}

template <typename M>
M propagate(double omega0, double e0, double nu, M x, double t0, double t1, std::size_t steps) {
	double const dt = (t1 - t0) / static_cast<double>(steps);
	auto drive = [&](double t) { return e0 * std::sin(nu * t); };
	for (std::size_t k = 0; k < steps; ++k) {
		double const t = t0 + dt * static_cast<double>(k);
		double const mid = drive(t + 0.5 * dt);
		M const k1 = schroedinger_rhs(omega0, drive(t), x);
		M const k2 = schroedinger_rhs(omega0, mid, M(x + 0.5 * dt * k1));
		M const k3 = schroedinger_rhs(omega0, mid, M(x + 0.5 * dt * k2));
		M const k4 = schroedinger_rhs(omega0, drive(t + dt), M(x + dt * k3));
		x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
	}
	return x;
}

double fold(double eps, double nu) {
	// into (-nu/2, nu/2]
	double r = std::remainder(eps, nu);
	if (r <= -0.5 * nu) r += nu;
	return r;
}

} // namespace

cvec2 propagate_driven_atom(atom_params const& atom, double e0_strength, double nu, cvec2 psi, double t0, double t1,
                            std::size_t steps) {
	if (steps == 0) return psi;
	return propagate(atom.omega0, e0_strength, nu, psi, t0, t1, steps);
}

cmat2 monodromy(atom_params const& atom, double e0_strength, double nu, std::size_t steps_per_period) {
	if (!(nu > 0.0)) throw std::invalid_argument("monodromy: nu must be positive");
	double const period = 2.0 * std::numbers::pi / nu;
	return propagate(atom.omega0, e0_strength, nu, cmat2(cmat2::Identity()), 0.0, period, steps_per_period);
}

floquet_result quasienergies(cmat2 const& m, double nu) {
	if (!(nu > 0.0)) throw std::invalid_argument("quasienergies: nu must be positive");
	double const defect = (m.adjoint() * m - cmat2::Identity()).norm();
	if (!(defect < 1e-8)) throw std::domain_error("quasienergies: one-period propagator is not unitary");

	Eigen::ComplexEigenSolver<cmat2> solver(m);
	if (solver.info() != Eigen::Success) throw std::domain_error("quasienergies: eigen-decomposition failed");

	double const period = 2.0 * std::numbers::pi / nu;
	std::array<cplx, 2> lambda{solver.eigenvalues()(0), solver.eigenvalues()(1)};
	std::array<cvec2, 2> vec{solver.eigenvectors().col(0), solver.eigenvectors().col(1)};
	std::array<double, 2> eps{};
	for (int k = 0; k < 2; ++k) eps[k] = fold(-std::arg(lambda[k]) / period, nu);

	if (eps[1] < eps[0]) {
		std::swap(eps[0], eps[1]);
		std::swap(vec[0], vec[1]);
	}

	// Orthonormalize: exact for distinct eigenvalues of a normal matrix, and
	// fixes the arbitrary basis the solver returns for a degenerate pair.
	vec[0].normalize();
	vec[1] -= vec[0].dot(vec[1]) * vec[0];
	if (vec[1].norm() < 1e-8) vec[1] = cvec2(-std::conj(vec[0](1)), std::conj(vec[0](0)));
	vec[1].normalize();

	floquet_result out;
	out.monodromy = m;
	out.nu = nu;
	out.quasi_energies = eps;
	double const gap = std::abs(eps[1] - eps[0]);
	out.delta_epsilon = std::min(gap, nu - gap);
	out.floquet_states_t0 = vec;
	return out;
}

floquet_result floquet_analysis(atom_params const& atom, double e0_strength, double nu) {
	return quasienergies(monodromy(atom, e0_strength, nu), nu);
}

delta_epsilon_grid delta_epsilon_map(atom_params const& atom, std::vector<double> const& e0_over_omega0,
                                     std::vector<double> const& detuning_over_omega0, unsigned threads) {
	if (e0_over_omega0.empty() || detuning_over_omega0.empty())
		throw std::invalid_argument("delta_epsilon_map: ranges must be nonempty");
	for (double d : detuning_over_omega0)
		if (!(d < 1.0)) throw std::invalid_argument("delta_epsilon_map: detuning must leave nu = omega0 - Delta > 0");

	delta_epsilon_grid out;
	out.e0_over_omega0 = e0_over_omega0;
	out.detuning_over_omega0 = detuning_over_omega0;
	auto const cols = detuning_over_omega0.size();
	out.values.assign(e0_over_omega0.size() * cols, 0.0);

	std::atomic<std::size_t> next_row{0};
	auto worker = [&] {
		for (std::size_t row = next_row++; row < e0_over_omega0.size(); row = next_row++) {
			for (std::size_t col = 0; col < cols; ++col) {
				double const nu = atom.omega0 * (1.0 - detuning_over_omega0[col]);
				auto const r = floquet_analysis(atom, e0_over_omega0[row] * atom.omega0, nu);
				out.values[row * cols + col] = r.delta_epsilon / nu;
			}
		}
	};

	unsigned const n = std::clamp<unsigned>(threads, 1u, static_cast<unsigned>(e0_over_omega0.size()));
	std::vector<std::jthread> pool;
	for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
	worker();
	return out;
}

std::string spectral_line::label() const {
	if (type == kind::harmonic) return "harmonic(" + std::to_string(order) + ")";
	std::string s = "sideband(" + std::to_string(order) + (side > 0 ? ",+)" : ",-)");
	if (merged) s += "[degenerate]";
	return s;
}

namespace {

// c_m = (1/K) sum_j x_j exp(-2 pi i m j / K), so x(t) = sum_m c_m exp(i m nu t)
std::vector<cplx> fourier_coefficients(std::vector<cplx> const& x, int max_order) {
	auto const k_samples = x.size();
	std::vector<cplx> c(static_cast<std::size_t>(2 * max_order + 1));
	for (int m = -max_order; m <= max_order; ++m) {
		cplx acc{0.0, 0.0};
		for (std::size_t j = 0; j < k_samples; ++j) {
			double const phase = -2.0 * std::numbers::pi * static_cast<double>(m) * static_cast<double>(j) /
			                     static_cast<double>(k_samples);
			acc += x[j] * std::polar(1.0, phase);
		}
		c[static_cast<std::size_t>(m + max_order)] = acc / static_cast<double>(k_samples);
	}
	return c;
}

cplx dipole_element(cvec2 const& bra, cvec2 const& ket) {
	// <bra| sigma_x |ket>
	return std::conj(bra(0)) * ket(1) + std::conj(bra(1)) * ket(0);
}

} // namespace

line_spectrum floquet_line_spectrum(atom_params const& atom, double e0_strength, double nu, cvec2 const& initial,
                                    line_spectrum_options const& options) {
	if (std::abs(initial.norm() - 1.0) > 1e-10)
		throw std::invalid_argument("floquet_line_spectrum: initial state must be normalized");
	if (options.samples < 8 || options.max_order < 1)
		throw std::invalid_argument("floquet_line_spectrum: need samples >= 8 and max_order >= 1");

	auto const fr = floquet_analysis(atom, e0_strength, nu);
	double const period = 2.0 * std::numbers::pi / nu;
	std::array<double, 2> eps{fr.quasi_energies[0] + options.representative_shift[0] * nu,
	                          fr.quasi_energies[1] + options.representative_shift[1] * nu};

	line_spectrum out;
	out.nu = nu;
	out.delta_epsilon = fr.delta_epsilon;
	out.max_order = options.max_order;
	out.alpha = fr.floquet_states_t0[0].dot(initial); // <phi_1(0)|psi>
	out.beta = fr.floquet_states_t0[1].dot(initial);

	auto const k_samples = options.samples;
	double const dt = period / static_cast<double>(k_samples);
	std::vector<cplx> d11(k_samples), d22(k_samples), d21(k_samples);
	cvec2 phi1 = fr.floquet_states_t0[0], phi2 = fr.floquet_states_t0[1];
	for (std::size_t j = 0; j < k_samples; ++j) {
		double const t = dt * static_cast<double>(j);
		cvec2 const p1 = std::polar(1.0, eps[0] * t) * phi1; // periodic parts
		cvec2 const p2 = std::polar(1.0, eps[1] * t) * phi2;
		d11[j] = dipole_element(p1, p1);
		d22[j] = dipole_element(p2, p2);
		d21[j] = dipole_element(p2, p1);
		phi1 = propagate_driven_atom(atom, e0_strength, nu, phi1, t, t + dt, 1);
		phi2 = propagate_driven_atom(atom, e0_strength, nu, phi2, t, t + dt, 1);
	}
	out.diag1 = fourier_coefficients(d11, options.max_order);
	out.diag2 = fourier_coefficients(d22, options.max_order);
	out.cross = fourier_coefficients(d21, options.max_order);

	double const a2 = std::norm(out.alpha), b2 = std::norm(out.beta);
	cplx const mix = out.alpha * std::conj(out.beta);
	auto power = [](double amplitude, double f) { return amplitude * amplitude * f * f * f * f; };

	// |alpha|^2 D11 + |beta|^2 D22: real signal, lines at m nu
	for (int m = 1; m <= options.max_order; ++m) {
		cplx const c = a2 * out.coefficient(out.diag1, m) + b2 * out.coefficient(out.diag2, m);
		spectral_line line;
		line.frequency = m * nu;
		line.weight = power(2.0 * std::abs(c), line.frequency);
		line.order = m;
		out.lines.push_back(line);
	}

	// alpha beta* <phi_2|D|phi_1> + c.c.: lines at |m nu - (eps_1 - eps_2)|
	bool const degenerate = fr.delta_epsilon < 1e-9 * nu;
	double const gap = eps[0] - eps[1];
	std::vector<spectral_line> side;
	for (int m = -options.max_order; m <= options.max_order; ++m) {
		double const f = std::abs(m * nu - gap);
		if (f > options.max_order * nu || f == 0.0) continue;
		spectral_line line;
		line.frequency = f;
		line.weight = power(2.0 * std::abs(mix * out.coefficient(out.cross, m)), f);
		line.type = spectral_line::kind::sideband;
		line.order = static_cast<int>(std::lround(f / nu));
		line.side = f >= line.order * nu ? 1 : -1;
		line.merged = degenerate;
		side.push_back(line);
	}
	std::sort(side.begin(), side.end(), [](auto const& a, auto const& b) { return a.frequency < b.frequency; });
	// lines that land on the same frequency (2 gap = 0 mod nu) are combined
	for (auto const& line : side) {
		if (!out.lines.empty() && out.lines.back().type == spectral_line::kind::sideband &&
		    std::abs(out.lines.back().frequency - line.frequency) < 1e-9 * nu)
			out.lines.back().weight += line.weight;
		else out.lines.push_back(line);
	}
	std::stable_sort(out.lines.begin(), out.lines.end(),
	                 [](auto const& a, auto const& b) { return a.frequency < b.frequency; });
	return out;
}

} // namespace hhg
