#include <doctest.h>

#include <hhg/meanfield.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace hhg;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

pulse_params no_drive(double tau = 100.0) { return pulse_params(0.0, 1.0, tau, envelope::sin2{}); }

// Straightforward per-variable transcription of the factorized equations.
std::vector<double> reference_rhs(meanfield_state const& s, double drive, mode_grid const& g, double w0) {
	auto const n = g.size();
	meanfield_state d(n);
	double su = 0.0, sv = 0.0;
	for (std::size_t k = 0; k < n; ++k) {
		double const wk = g.frequencies()[k], ok = g.couplings()[k];
		double const Up = s.u_plus()[k], Um = s.u_minus()[k], Vp = s.v_plus()[k], Vm = s.v_minus()[k];
		double const Wp = s.w_plus()[k], Wm = s.w_minus()[k], N = s.n_exp()[k];
		d.u_plus()[k] = w0 * Vp - wk * Um;
		d.u_minus()[k] = w0 * Vm + wk * Up + ok;
		d.v_plus()[k] = -w0 * Up - wk * Vm + drive * Wp + s.w() * ok * (2 * N + 1);
		d.v_minus()[k] = -w0 * Um + wk * Vp + drive * Wm;
		d.w_plus()[k] = -wk * Wm - drive * Vp - s.v() * ok * (2 * N + 1);
		d.w_minus()[k] = wk * Wp - drive * Vm;
		d.n_exp()[k] = 0.5 * ok * Um;
		su += ok * Wp;
		sv += ok * Vp;
	}
	d.u() = w0 * s.v();
	d.v() = -w0 * s.u() + drive * s.w() + su;
	d.w() = -drive * s.v() - sv;
	return {d.raw().begin(), d.raw().end()};
}

trajectory run(meanfield_state const& s, pulse_params const& p, mode_grid const& g, double t_end, double dt,
               std::size_t stride = 50) {
	integrate_options o;
	o.t_end = t_end;
	o.dt = dt;
	o.stride = stride;
	o.monitor_validity = false;
	return integrate(s, p, g, atom_params(1.0), o);
}

double max_abs_diff(std::span<double const> a, std::span<double const> b) {
	double m = 0.0;
	for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
	return m;
}

} // namespace

TEST_CASE("state layout") {
	meanfield_state s(4);
	CHECK(s.dimension() == 31);
	s.w_plus()[2] = 7.0;
	CHECK(s.raw()[3 + 4 * meanfield_state::w_plus_block + 2] == 7.0);
	CHECK(s.variable_name(0) == "u");
	CHECK(s.variable_name(3 + 4 * meanfield_state::photons_block + 1).find("N") != std::string::npos);
	CHECK(meanfield_state::ground(2).w() == -1.0);
	CHECK(meanfield_state::excited(2).w() == 1.0);
}

TEST_CASE("decoupled ground state is stationary") {
	mode_grid g({1.0, 2.0}, {0.0, 0.0});
	auto const d = derivatives(meanfield_state::ground(2), 0.3, no_drive(), g, atom_params(1.0));
	for (double x : d.raw()) CHECK(x == 0.0);
}

TEST_CASE("free precession derivative") {
	mode_grid g({1.0}, {0.0});
	meanfield_state s(1);
	s.u() = 1.0;
	auto const d = derivatives(s, 0.0, no_drive(), g, atom_params(1.0));
	CHECK(d.u() == 0.0);
	CHECK(d.v() == -1.0);
	CHECK(d.w() == 0.0);
}

TEST_CASE("vacuum source terms of a single coupled mode") {
	double const om = 0.01;
	mode_grid g({1.0}, {om});
	auto const d = derivatives(meanfield_state::ground(1), 0.0, no_drive(), g, atom_params(1.0));
	for (std::size_t i = 0; i < d.dimension(); ++i) {
		if (i == 3 + meanfield_state::u_minus_block) CHECK(d.raw()[i] == doctest::Approx(om));
		else if (i == 3 + meanfield_state::v_plus_block) CHECK(d.raw()[i] == doctest::Approx(-om));
		else CHECK(d.raw()[i] == 0.0);
	}
}

TEST_CASE("derivatives agree with a direct transcription on random states") {
	std::mt19937_64 rng(7);
	std::uniform_real_distribution<double> u(-1.0, 1.0);
	auto g = build_mode_grid(9, 5.0, 0.02, 1.3);
	double const nu = 0.9, tau = 40.0;
	pulse_params p(2.0, nu, tau, envelope::sin2{});
	for (int trial = 0; trial < 5; ++trial) {
		meanfield_state s(9);
		for (auto& x : s.raw()) x = u(rng);
		double const t = 3.0 + trial * 4.1;
		auto const d = derivatives(s, t, p, g, atom_params(1.3));
		auto const ref = reference_rhs(s, evaluate_pulse(p, t), g, 1.3);
		for (std::size_t i = 0; i < ref.size(); ++i) CHECK(d.raw()[i] == doctest::Approx(ref[i]).epsilon(1e-13));
	}
}

TEST_CASE("dimension mismatch is rejected") {
	mode_grid g({1.0, 2.0}, {0.1, 0.1});
	CHECK_THROWS_AS(derivatives(meanfield_state::ground(3), 0.0, no_drive(), g, atom_params(1.0)),
	                std::invalid_argument);
	integrate_options o;
	o.t_end = 1.0;
	o.dt = 0.01;
	CHECK_THROWS_AS(integrate(meanfield_state::ground(1), no_drive(), g, atom_params(1.0), o), std::invalid_argument);
}

TEST_CASE("trajectory sampling") {
	auto g = build_mode_grid(3, 3.0, 1e-3, 1.0);
	auto const tr = run(meanfield_state::ground(3), pulse_params(0.5, 1.0, 10.0), g, 10.0, 0.01, 7);
	CHECK(tr.steps == 1000);
	CHECK(tr.dipole_series.size() == tr.steps + 1);
	CHECK(tr.inversion_series.size() == tr.steps + 1);
	CHECK(tr.times.front() == 0.0);
	CHECK(tr.times.back() == doctest::Approx(10.0).epsilon(1e-12));
	for (std::size_t k = 1; k < tr.times.size(); ++k) CHECK(tr.times[k] > tr.times[k - 1]);
	CHECK(tr.states.size() == tr.times.size());
	CHECK(tr.dipole_series.back() == tr.final_state().u());
	// the step is shrunk so the run ends exactly at t_end
	auto const odd = run(meanfield_state::ground(3), no_drive(), g, 1.0, 0.3);
	CHECK(odd.steps == 4);
	CHECK(odd.dt == doctest::Approx(0.25));
}

TEST_CASE("non-finite state aborts with a diagnostic") {
	mode_grid g({1.0}, {0.1});
	auto s = meanfield_state::ground(1);
	s.v_minus()[0] = std::nan("");
	try {
		run(s, no_drive(), g, 1.0, 0.01);
		FAIL("expected numerical_error");
	} catch (numerical_error const& e) {
		CHECK(std::string(e.what()).find("V-") != std::string::npos);
		CHECK(e.index() == 3 + meanfield_state::v_minus_block);
	}
}

TEST_CASE("no drive and ground state: only the vacuum ripple") {
	double const T = two_pi;
	auto g = build_mode_grid(100, 30.0, 1e-3, 1.0);
	auto const tr = run(meanfield_state::ground(100), no_drive(12 * T), g, 12 * T, T / 1000);
	for (double n : tr.final_state().n_exp()) CHECK(n < 1e-6);
}

TEST_CASE("Bloch length is conserved without coupling") {
	double const T = two_pi;
	auto g = build_mode_grid(3, 3.0, 0.0, 1.0);
	meanfield_state s = meanfield_state::ground(3);
	auto const tr = run(s, pulse_params(0.5, 1.0, 100 * T, envelope::sin2{}), g, 100 * T, T / 1000, 100);
	double worst = 0.0;
	for (auto const& st : tr.states) worst = std::max(worst, std::abs(st.bloch_length_squared() - 1.0));
	CHECK(worst < 1e-10);
}

TEST_CASE("Bloch vector stays inside the sphere for weak coupling") {
	double const T = two_pi;
	auto g = build_mode_grid(150, 30.0, 1e-3, 1.0);
	auto const tr = run(meanfield_state::ground(150), pulse_params(3.0, 1.0, 12 * T), g, 12 * T, T / 1000, 10);
	for (auto const& st : tr.states) CHECK(st.bloch_length_squared() <= 1.0 + 1e-6);
}

TEST_CASE("fourth-order convergence") {
	double const T = two_pi;
	auto g = build_mode_grid(3, 3.0, 0.05, 1.0);
	pulse_params p(1.5, 1.0, 2 * T, envelope::sin2{});
	auto final_state = [&](double dt) { return run(meanfield_state::ground(3), p, g, 2 * T, dt, 1000000).final_state(); };
	auto const ref = final_state(T / 3200);
	auto const coarse = final_state(T / 100);
	auto const fine = final_state(T / 200);
	double const e1 = max_abs_diff(coarse.raw(), ref.raw());
	double const e2 = max_abs_diff(fine.raw(), ref.raw());
	INFO("errors " << e1 << " " << e2);
	CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(2.0 / 16.0));
}

TEST_CASE("halving the default step changes the final state below 1e-8") {
	double const T = two_pi;
	auto g = build_mode_grid(3, 3.0, 1e-3, 1.0);
	pulse_params p(2.0, 1.0, 12 * T, envelope::sin2{});
	auto const a = run(meanfield_state::ground(3), p, g, 12 * T, T / 1000, 1000000).final_state();
	auto const b = run(meanfield_state::ground(3), p, g, 12 * T, T / 2000, 1000000).final_state();
	double scale = 0.0;
	for (double x : b.raw()) scale = std::max(scale, std::abs(x));
	CHECK(max_abs_diff(a.raw(), b.raw()) / scale < 1e-8);
}

TEST_CASE("energy bookkeeping without drive") {
	double const T = two_pi;
	auto g = build_mode_grid(3, 3.0, 0.01, 1.0);
	auto const tr = run(meanfield_state::excited(3), no_drive(), g, 100 * T, T / 1000, 100);
	auto energy = [&](meanfield_state const& s) {
		double e = 0.5 * s.w();
		for (std::size_t n = 0; n < 3; ++n)
			e += g.frequencies()[n] * s.n_exp()[n] + 0.5 * g.couplings()[n] * s.u_plus()[n];
		return e;
	};
	double const e0 = energy(tr.states.front());
	double drift = 0.0;
	for (auto const& s : tr.states) drift = std::max(drift, std::abs(energy(s) - e0));
	CHECK(drift < 1e-6);
}

TEST_CASE("photon number rate identity") {
	double const T = two_pi, dt = T / 1000;
	auto g = build_mode_grid(4, 8.0, 0.01, 1.0);
	auto const tr = run(meanfield_state::ground(4), pulse_params(2.0, 1.0, 3 * T), g, 3 * T, dt, 1);
	double worst = 0.0, scale = 0.0;
	for (std::size_t k = 1; k + 1 < tr.states.size(); k += 37) {
		for (std::size_t n = 0; n < 4; ++n) {
			double const fd = (tr.states[k + 1].n_exp()[n] - tr.states[k - 1].n_exp()[n]) / (2 * dt);
			double const exact = 0.5 * g.couplings()[n] * tr.states[k].u_minus()[n];
			worst = std::max(worst, std::abs(fd - exact));
			scale = std::max(scale, std::abs(exact));
		}
	}
	CHECK(worst < 1e-3 * scale);
}

TEST_CASE("identical inputs give bitwise identical trajectories") {
	auto g = build_mode_grid(50, 30.0, 1e-3, 1.0);
	pulse_params p(3.0, 1.0, 2 * two_pi);
	auto const a = run(meanfield_state::ground(50), p, g, 2 * two_pi, two_pi / 500, 10);
	auto const b = run(meanfield_state::ground(50), p, g, 2 * two_pi, two_pi / 500, 10);
	CHECK(a.states == b.states);
	CHECK(a.dipole_series == b.dipole_series);
}

TEST_CASE("validity monitor") {
	double const T = two_pi;
	std::vector<std::string> msgs;
	integrate_options o;
	o.t_end = 4 * T;
	o.dt = T / 500;
	o.warn = [&](std::string_view m) { msgs.emplace_back(m); };
	auto weak = build_mode_grid(20, 30.0, 1e-4, 1.0);
	auto const a = integrate(meanfield_state::ground(20), pulse_params(1.0, 1.0, 4 * T), weak, atom_params(1.0), o);
	CHECK_FALSE(a.validity_warning);
	CHECK(msgs.empty());
	auto strong = build_mode_grid(20, 30.0, 0.2, 1.0);
	auto const b = integrate(meanfield_state::ground(20), pulse_params(1.0, 1.0, 4 * T), strong, atom_params(1.0), o);
	CHECK(b.validity_warning);
	CHECK(b.max_free_deviation > 1e-3);
	CHECK(msgs.size() == 1);
}

TEST_CASE("photon clamp") {
	CHECK(clamp_photon_number(-5e-13) == 0.0);
	CHECK(clamp_photon_number(-1e-9) == -1e-9);
	CHECK(clamp_photon_number(3e-7) == 3e-7);
}

TEST_CASE("spectrogram reshapes snapshots") {
	mode_grid g({2.0}, {0.01});
	auto const tr = run(meanfield_state::ground(1), no_drive(), g, 1.0, 0.5, 2);
	REQUIRE(tr.states.size() == 2);
	auto const sg = spectrogram(tr, g, 1.0);
	CHECK(sg.rows == 2);
	CHECK(sg.cols == 1);
	CHECK(sg.at(0, 0) == tr.states[0].n_exp()[0]);
	CHECK(sg.at(1, 0) == clamp_photon_number(tr.final_state().n_exp()[0]));
	CHECK(sg.freq_over_nu[0] == doctest::Approx(2.0));
	CHECK(sg.time_cycles[1] == doctest::Approx(1.0 / two_pi));

	auto const one = run(meanfield_state::ground(1), no_drive(), g, 0.0, 0.5);
	CHECK_THROWS_AS(spectrogram(one, g, 1.0), std::invalid_argument);
}

TEST_CASE("spectrogram final row equals the final state") {
	auto g = build_mode_grid(30, 30.0, 1e-3, 1.0);
	auto const tr = run(meanfield_state::ground(30), pulse_params(3.0, 1.0, 2 * two_pi), g, 2 * two_pi, two_pi / 400, 40);
	auto const sg = spectrogram(tr, g, 1.0);
	for (std::size_t c = 0; c < sg.cols; ++c)
		CHECK(sg.at(sg.rows - 1, c) == clamp_photon_number(tr.final_state().n_exp()[c]));
}
