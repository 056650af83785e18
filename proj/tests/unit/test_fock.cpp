#include <doctest.h>

#include <hhg/fock.hpp>
#include <hhg/meanfield.hpp>
#include <hhg/spectra.hpp>

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace hhg;

namespace {

constexpr double pi = std::numbers::pi;

std::vector<cplx> random_vector(std::size_t n, std::mt19937_64& rng) {
	std::normal_distribution<double> d;
	std::vector<cplx> v(n);
	for (auto& x : v) x = {d(rng), d(rng)};
	return v;
}

cplx dot(std::vector<cplx> const& a, std::vector<cplx> const& b) {
	cplx s{};
	for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
	return s;
}

std::vector<fock_mode> modes_for(std::vector<double> const& harmonics, double nu, double scale = 1e-3) {
	std::vector<fock_mode> m;
	for (double h : harmonics) m.push_back({h * nu, scale * std::sqrt(h * nu)});
	return m;
}

} // namespace

TEST_CASE("basis indexing") {
	fock_space two(2, 3);
	CHECK(two.dimension() == 32);
	CHECK(two.index({2, 1}, 1) == (2 * 4 + 1) * 2 + 1);
	for (std::size_t k = 0; k < two.dimension(); ++k) {
		CHECK(two.index({two.photons(k, 0), two.photons(k, 1)}, two.atom_level(k)) == k);
	}
	fock_space one(1, 5);
	CHECK(one.dimension() == 12);
	CHECK(one.photons(one.index({4, 0}, 0), 0) == 4);
	CHECK_THROWS(fock_space(3, 4));
}

TEST_CASE("matrix-free Hamiltonian matches the Kronecker-product oracle") {
	atom_params const atom(1.0);
	for (std::size_t nm : {1u, 2u}) {
		std::size_t const M = 4;
		fock_space space(nm, M);
		std::vector<fock_mode> modes{{2.0, 0.3}, {3.5, 0.7}};
		modes.resize(nm);
		double const drive = 0.8;
		std::vector<double> f, g;
		for (auto const& m : modes) f.push_back(m.frequency), g.push_back(m.coupling);
		auto const ref = oracle::kron_hamiltonian(nm, M, f, g, 1.0, drive);
		auto const dense = hamiltonian_matrix(space, modes, atom, drive);
		CHECK((dense - ref).norm() < 1e-12);

		std::mt19937_64 rng(5);
		auto const psi = random_vector(space.dimension(), rng);
		std::vector<cplx> out(space.dimension());
		apply_hamiltonian(space, modes, atom, drive, psi, out);
		Eigen::Map<Eigen::VectorXcd const> v(psi.data(), static_cast<Eigen::Index>(psi.size()));
		Eigen::VectorXcd const expect = ref * v;
		double err = 0.0;
		for (std::size_t i = 0; i < out.size(); ++i) err = std::max(err, std::abs(out[i] - expect(static_cast<Eigen::Index>(i))));
		CHECK(err < 1e-12);
	}
}

TEST_CASE("Hamiltonian application is self-adjoint") {
	fock_space space(2, 10);
	auto const modes = modes_for({7.0, 8.0}, 1.0, 0.05);
	std::mt19937_64 rng(9);
	for (int trial = 0; trial < 4; ++trial) {
		auto const x = random_vector(space.dimension(), rng);
		auto const y = random_vector(space.dimension(), rng);
		std::vector<cplx> hx(x.size()), hy(y.size()), hhx(x.size());
		apply_hamiltonian(space, modes, atom_params(1.0), 1.7, x, hx);
		apply_hamiltonian(space, modes, atom_params(1.0), 1.7, y, hy);
		apply_hamiltonian(space, modes, atom_params(1.0), 1.7, hx, hhx);
		double const scale = std::sqrt(std::abs(dot(hx, hx)) * std::abs(dot(y, y)));
		CHECK(std::abs(dot(y, hx) - dot(hy, x)) < 1e-12 * scale);
		// <x|H H|x> = |H x|^2
		CHECK(std::abs(dot(x, hhx) - dot(hx, hx)) < 1e-12 * std::abs(dot(hx, hx)));
	}
}

TEST_CASE("uncoupled vacuum ground state is stationary") {
	fock_space space(1, 6);
	auto const modes = modes_for({1.0}, 1.0, 0.0);
	auto const psi0 = vacuum_ground(space, modes);
	evolve_options o;
	o.t_end = 10 * 2 * pi;
	o.sample_every = 100;
	auto const h = evolve(psi0, pulse_params(0.0, 1.0, 1.0), atom_params(1.0), o);
	auto const idx = space.index({0, 0}, 1);
	for (auto const& s : h.states) {
		CHECK(std::abs(std::norm(s.amplitudes[idx]) - 1.0) < 1e-8);
		double other = 0.0;
		for (std::size_t k = 0; k < s.amplitudes.size(); ++k)
			if (k != idx) other += std::norm(s.amplitudes[k]);
		CHECK(other == 0.0);
	}
	// global phase e^{+i omega0 t / 2}
	auto const& last = h.states.back().amplitudes[idx];
	CHECK(std::abs(std::arg(last) - std::remainder(0.5 * o.t_end, 2 * pi)) < 1e-6);
}

TEST_CASE("resonant Jaynes-Cummings Rabi frequency") {
	double const om = 1e-3;
	for (std::size_t n : {0u, 1u, 2u}) {
		fock_space space(1, 10);
		std::vector<fock_mode> modes{{1.0, om}};
		auto const psi = make_product_state(space, modes, {number_amplitudes(10, n)}, {1.0, 0.0});
		double const rabi = om * std::sqrt(n + 1.0);
		evolve_options o;
		o.t_end = 1.5 * 2 * pi / rabi;
		o.sample_every = 200;
		auto const h = evolve(psi, pulse_params(0.0, 1.0, 1.0), atom_params(1.0), o);
		std::vector<double> t, z;
		for (std::size_t k = 0; k < h.states.size(); ++k) {
			t.push_back(h.times[k]);
			z.push_back(atom_mode_expectation(h.states[k], pauli::z, {}).real());
		}
		auto const f = fit_sinusoid(t, z, 0.5 * rabi, 2.0 * rabi);
		INFO("n = " << n);
		CHECK(f.frequency == doctest::Approx(rabi).epsilon(0.01));
	}
}

TEST_CASE("norm drift at the default step") {
	fock_space space(2, 10);
	auto const modes = modes_for({7.0, 8.0}, 1.0);
	double const T = 2 * pi;
	evolve_options o;
	o.t_end = 14 * T;
	o.sample_every = 50;
	auto const h = evolve(vacuum_ground(space, modes), pulse_params(3.0, 1.0, 12 * T), atom_params(1.0), o);
	CHECK(h.max_norm_drift < 1e-8);
	CHECK(h.max_edge_population < 1e-10);
	CHECK(h.dt <= max_fock_step(pulse_params(3.0, 1.0, 12 * T), modes));
}

TEST_CASE("step limit and truncation guard") {
	fock_space space(1, 3);
	auto const modes = modes_for({8.0}, 1.0);
	pulse_params const p(0.0, 1.0, 2 * pi);
	CHECK(max_fock_step(p, modes) == doctest::Approx(2 * pi / 8.0 / 200.0));
	evolve_options o;
	o.t_end = 1.0;
	o.dt = 2.0 * max_fock_step(p, modes);
	CHECK_THROWS_AS(evolve(vacuum_ground(space, modes), p, atom_params(1.0), o), std::invalid_argument);

	// a coherent state that fills the truncated ladder aborts
	auto const full = make_product_state(space, modes, {coherent_amplitudes(3, 2.0)}, {0.0, 1.0});
	evolve_options o2;
	o2.t_end = 1.0;
	CHECK_THROWS_AS(evolve(full, p, atom_params(1.0), o2), numerical_error);

	std::vector<cplx> unnormalized(space.dimension(), 1.0);
	fock_state bad{space, modes, unnormalized};
	CHECK_THROWS_AS(evolve(bad, p, atom_params(1.0), o2), std::invalid_argument);
}

TEST_CASE("vacuum statistics") {
	fock_space space(2, 5);
	auto const s = vacuum_ground(space, modes_for({7.0, 8.0}, 1.0));
	for (std::size_t i = 0; i < 2; ++i) {
		auto const st = photon_statistics(s, i);
		CHECK(st.distribution[0] == 1.0);
		CHECK(st.mean == 0.0);
		CHECK_FALSE(st.mandel_q.has_value());
	}
	CHECK_FALSE(g2_equal_time(s, 0, 1).has_value());
	CHECK_FALSE(g2_equal_time(s, 0, 0).has_value());
	CHECK_THROWS_AS(photon_statistics(s, 2), std::invalid_argument);
}

TEST_CASE("number and coherent state statistics") {
	fock_space space(1, 12);
	auto const modes = modes_for({1.0}, 1.0);
	auto const n3 = photon_statistics(make_product_state(space, modes, {number_amplitudes(12, 3)}, {0.0, 1.0}), 0);
	CHECK(n3.mean == doctest::Approx(3.0));
	REQUIRE(n3.mandel_q.has_value());
	CHECK(*n3.mandel_q == doctest::Approx(-1.0));

	fock_space big(1, 40);
	auto const coh = photon_statistics(
	    make_product_state(big, modes_for({1.0}, 1.0), {coherent_amplitudes(40, {1.2, 0.5})}, {0.0, 1.0}), 0);
	CHECK(coh.mean == doctest::Approx(1.69).epsilon(1e-10));
	CHECK(std::abs(*coh.mandel_q) < 1e-10);
	double total = 0.0;
	for (double p : coh.distribution) total += p;
	CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
	// Poisson distribution
	for (std::size_t n = 0; n < 6; ++n)
		CHECK(coh.distribution[n] == doctest::Approx(std::exp(-1.69) * std::pow(1.69, n) / std::tgamma(n + 1.0)));
}

TEST_CASE("coherent product state has g2 equal to one") {
	std::size_t const M = 40;
	fock_space space(2, M);
	auto const modes = modes_for({2.0, 3.0}, 1.0, 0.0);
	auto const psi =
	    make_product_state(space, modes, {coherent_amplitudes(M, {0.8, 0.1}), coherent_amplitudes(M, {0.0, -1.1})},
	                       {0.0, 1.0});
	pulse_params const p(0.0, 1.0, 1.0);
	evolve_options o;
	o.t_end = 2 * pi;
	// RK4 damps high Fock levels unevenly; a finer step keeps the distribution Poissonian
	o.dt = max_fock_step(p, modes) / 8;
	o.sample_every = 400;
	auto const h = evolve(psi, p, atom_params(1.0), o);
	for (auto const& s : h.states) {
		CHECK(std::abs(*g2_equal_time(s, 0, 1) - 1.0) < 1e-8);
		CHECK(std::abs(*g2_equal_time(s, 0, 0) - 1.0) < 1e-8);
		CHECK(std::abs(*g2_equal_time(s, 1, 1) - 1.0) < 1e-8);
		// the literal numerator adds 1/<N>
		double const n0 = photon_statistics(s, 0).mean;
		CHECK(*g2_equal_time_literal(s, 0, 0) == doctest::Approx(1.0 + 1.0 / n0).epsilon(1e-8));
	}
}

TEST_CASE("atom-mode expectations") {
	fock_space space(1, 6);
	auto const modes = modes_for({1.0}, 1.0);
	auto const s = make_product_state(space, modes, {number_amplitudes(6, 2)}, {1.0, 0.0});
	using op = std::pair<std::size_t, bool>;
	std::array<op, 2> const number{op{0, true}, op{0, false}};
	CHECK(atom_mode_expectation(s, pauli::z, {}).real() == doctest::Approx(1.0));
	CHECK(atom_mode_expectation(s, pauli::z, number).real() == doctest::Approx(2.0));
	CHECK(std::abs(atom_mode_expectation(s, pauli::x, number)) < 1e-15);
	CHECK(atom_mode_expectation(s, std::nullopt, number).real() == doctest::Approx(2.0));
	auto const plus = make_product_state(space, modes, {number_amplitudes(6, 0)}, {1.0, 1.0});
	CHECK(atom_mode_expectation(plus, pauli::x, {}).real() == doctest::Approx(1.0));
	CHECK(std::abs(atom_mode_expectation(plus, pauli::y, {})) < 1e-15);
}

TEST_CASE("audit without coupling finds exact zeros") {
	fock_space space(2, 6);
	auto const modes = modes_for({7.0, 8.0}, 1.0, 0.0);
	evolve_options o;
	o.t_end = 3 * 2 * pi;
	o.sample_every = 100;
	auto const h = evolve(vacuum_ground(space, modes), pulse_params(3.0, 1.0, 3 * 2 * pi), atom_params(1.0), o);
	auto const r = cross_term_audit(h, [](std::string_view) {});
	CHECK(r.max_neglected == 0.0);
	CHECK(r.max_ratio == 0.0);
	CHECK(r.samples == h.states.size());
	CHECK_FALSE(r.degenerate_modes);
}

TEST_CASE("audit warns about degenerate modes") {
	fock_space space(2, 3);
	auto const modes = modes_for({5.0, 5.0}, 1.0);
	evolve_options o;
	o.t_end = 0.1;
	auto const h = evolve(vacuum_ground(space, modes), pulse_params(0.0, 1.0, 1.0), atom_params(1.0), o);
	std::vector<std::string> msgs;
	auto const r = cross_term_audit(h, [&](std::string_view m) { msgs.emplace_back(m); });
	CHECK(r.degenerate_modes);
	REQUIRE(msgs.size() == 1);
	CHECK(msgs[0].find("degenerate") != std::string::npos);

	fock_space single(1, 3);
	auto const h1 = evolve(vacuum_ground(single, modes_for({5.0}, 1.0)), pulse_params(0.0, 1.0, 1.0), atom_params(1.0), o);
	CHECK_THROWS_AS(cross_term_audit(h1), std::invalid_argument);
}

TEST_CASE("factorization holds for seeded modes") {
	std::size_t const M = 14;
	fock_space space(2, M);
	auto const modes = modes_for({7.0, 8.0}, 1.0);
	double const T = 2 * pi;
	auto const psi = make_product_state(space, modes, {number_amplitudes(M, 1), number_amplitudes(M, 2)}, {0.0, 1.0});
	evolve_options o;
	o.t_end = 12 * T;
	o.sample_every = 50;
	auto const h = evolve(psi, pulse_params(3.0, 1.0, 12 * T), atom_params(1.0), o);
	auto const r = cross_term_audit(h, [](std::string_view) {});
	INFO("factorization error " << r.max_factorization_error);
	CHECK(r.max_factorization_error < 0.01);
}

TEST_CASE("photon statistics at weak coupling") {
	fock_space space(1, 10);
	auto const modes = modes_for({8.0}, 1.0);
	double const T = 2 * pi;
	evolve_options o;
	o.t_end = 14 * T;
	o.sample_every = 50;
	auto const h = evolve(vacuum_ground(space, modes), pulse_params(3.0, 1.0, 12 * T), atom_params(1.0), o);
	for (auto const& s : h.states) CHECK(photon_statistics(s, 0).distribution[0] > 0.99);
}

TEST_CASE("single-mode Fock and mean-field photon numbers agree") {
	double const T = 2 * pi, w = 7.0, om = 1e-3 * std::sqrt(w);
	pulse_params const p(3.0, 1.0, 12 * T);

	fock_space space(1, 10);
	std::vector<fock_mode> modes{{w, om}};
	evolve_options o;
	o.t_end = 12 * T;
	o.sample_every = 10;
	auto const h = evolve(vacuum_ground(space, modes), p, atom_params(1.0), o);
	double peak_fock = 0.0;
	for (auto const& s : h.states) peak_fock = std::max(peak_fock, photon_statistics(s, 0).mean);

	fock_space two(2, 10);
	auto const audit_h = evolve(vacuum_ground(two, {{w, om}, {w + 1.0, 1e-3 * std::sqrt(w + 1.0)}}), p, atom_params(1.0), o);
	CHECK(cross_term_audit(audit_h, [](std::string_view) {}).max_ratio < 1e-3);

	integrate_options mo;
	mo.t_end = 12 * T;
	mo.dt = T / 1000;
	mo.stride = 1;
	mo.monitor_validity = false;
	auto const tr = integrate(meanfield_state::ground(1), p, mode_grid({w}, {om}), atom_params(1.0), mo);
	double peak_mf = 0.0;
	for (auto const& s : tr.states) peak_mf = std::max(peak_mf, s.n_exp()[0]);
	INFO("fock " << peak_fock << " meanfield " << peak_mf);
	CHECK(peak_mf == doctest::Approx(peak_fock).epsilon(0.05));
}

TEST_CASE("statistics do not depend on the truncation beyond M = 10") {
	double const T = 2 * pi;
	auto run = [&](std::size_t M) {
		fock_space space(1, M);
		evolve_options o;
		o.t_end = 16 * T;
		o.sample_every = 100;
		return evolve(vacuum_ground(space, modes_for({8.0}, 1.0)), pulse_params(3.0, 1.0, 12 * T), atom_params(1.0), o);
	};
	auto const a = run(10), b = run(15);
	REQUIRE(a.states.size() == b.states.size());
	double worst = 0.0;
	for (std::size_t k = 0; k < a.states.size(); ++k) {
		auto const sa = photon_statistics(a.states[k], 0), sb = photon_statistics(b.states[k], 0);
		worst = std::max(worst, std::abs(sa.mean - sb.mean));
		if (sa.mandel_q && sb.mandel_q) worst = std::max(worst, std::abs(*sa.mandel_q - *sb.mandel_q));
		for (std::size_t n = 0; n <= 5; ++n) worst = std::max(worst, std::abs(sa.distribution[n] - sb.distribution[n]));
	}
	CHECK(worst < 1e-6);
}
