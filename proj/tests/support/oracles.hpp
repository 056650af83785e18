#ifndef HHG_TEST_ORACLES_HPP
#define HHG_TEST_ORACLES_HPP

// Independent reference implementations used only by the tests.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

inline double fold(double x, double nu) {
	double r = std::fmod(x, nu);
	if (r <= -0.5 * nu) r += nu;
	if (r > 0.5 * nu) r -= nu;
	return r;
}

// Quasi-energy splitting from the truncated extended Floquet matrix of
//   H(t) = (omega0/2) sigma_z - (e0/2) sin(nu t) sigma_x,
// blocks m = -blocks..blocks, (H_F)_{m,m'} = H^(m-m') + m nu delta_{mm'},
// H^(+-1) = +-i e0/4 sigma_x.
inline double extended_floquet_splitting(double omega0, double e0, double nu, int blocks = 40) {
	int const nb = 2 * blocks + 1;
	Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2 * nb, 2 * nb);
	for (int b = 0; b < nb; ++b) {
		double const m = b - blocks;
		h(2 * b, 2 * b) = 0.5 * omega0 + m * nu;
		h(2 * b + 1, 2 * b + 1) = -0.5 * omega0 + m * nu;
		if (b + 1 < nb) {
			// block (m, m+1) carries H^(-1), block (m+1, m) carries H^(+1)
			cplx const up{0.0, -0.25 * e0}, down{0.0, 0.25 * e0};
			h(2 * b, 2 * (b + 1) + 1) = up;
			h(2 * b + 1, 2 * (b + 1)) = up;
			h(2 * (b + 1), 2 * b + 1) = down;
			h(2 * (b + 1) + 1, 2 * b) = down;
		}
	}
	Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
	std::vector<double> folded;
	for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
		double const e = es.eigenvalues()(i);
		if (std::abs(e) < 5.0 * nu) folded.push_back(fold(e, nu));
	}
	// two equivalence classes; take the representative spread
	double const a = folded.front();
	double best = 0.0;
	for (double x : folded) {
		double const d = std::abs(fold(x - a, nu));
		best = std::max(best, d);
	}
	return best;
}

// Dense Hamiltonian built from Kronecker products, ordering mode1 (x) mode2 (x) atom,
// atom basis (e, g).
inline Eigen::MatrixXcd kron_hamiltonian(std::size_t n_modes, std::size_t m_max, std::vector<double> const& freq,
                                         std::vector<double> const& coupling, double omega0, double drive) {
	auto const L = static_cast<Eigen::Index>(m_max + 1);
	Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(L, L);
	for (Eigen::Index n = 1; n < L; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
	Eigen::MatrixXcd const id_mode = Eigen::MatrixXcd::Identity(L, L);
	Eigen::MatrixXcd const id_atom = Eigen::MatrixXcd::Identity(2, 2);
	Eigen::MatrixXcd sz(2, 2), sx(2, 2);
	sz << 1, 0, 0, -1;
	sx << 0, 1, 1, 0;

	auto embed = [&](Eigen::MatrixXcd const& mode_op, std::size_t which, Eigen::MatrixXcd const& atom_op) {
		Eigen::MatrixXcd left = which == 0 ? mode_op : id_mode;
		if (n_modes == 2) left = Eigen::kroneckerProduct(left, which == 1 ? mode_op : id_mode).eval();
		return Eigen::MatrixXcd(Eigen::kroneckerProduct(left, atom_op));
	};
	Eigen::MatrixXcd const id_field = n_modes == 2 ? Eigen::MatrixXcd(Eigen::kroneckerProduct(id_mode, id_mode)) : id_mode;
	Eigen::MatrixXcd h = 0.5 * omega0 * Eigen::kroneckerProduct(id_field, sz).eval();
	h -= 0.5 * drive * Eigen::kroneckerProduct(id_field, sx).eval();
	for (std::size_t i = 0; i < n_modes; ++i) {
		Eigen::MatrixXcd const num = a.adjoint() * a;
		Eigen::MatrixXcd const x = a + a.adjoint();
		h += freq[i] * embed(num, i, id_atom);
		h += 0.5 * coupling[i] * embed(x, i, sx);
	}
	return h;
}

} // namespace oracle

#endif
