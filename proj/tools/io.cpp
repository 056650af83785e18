#include <hhg/config.hpp>
#include <hhg/io.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hhg {

std::string format_number(double x) {
	if (std::isnan(x)) return "nan";
	char buf[64];
	auto const r = std::to_chars(buf, buf + sizeof buf, x);
	return std::string(buf, r.ptr);
}

table_writer::table_writer(std::string_view title, std::string_view config_hash) {
	buf_ += "# ";
	buf_ += title;
	buf_ += "\n# config_hash ";
	buf_ += config_hash;
	buf_ += '\n';
}

table_writer& table_writer::meta(std::string_view line) {
	buf_ += "# ";
	buf_ += line;
	buf_ += '\n';
	return *this;
}

table_writer& table_writer::columns(std::vector<std::string> const& names) {
	buf_ += "# columns:";
	for (auto const& n : names) (buf_ += ' ') += n;
	buf_ += '\n';
	return *this;
}

table_writer& table_writer::row(std::vector<double> const& values) {
	for (std::size_t i = 0; i < values.size(); ++i) {
		if (i) buf_ += ' ';
		buf_ += format_number(values[i]);
	}
	buf_ += '\n';
	return *this;
}

table_writer& table_writer::text(std::string_view block) {
	buf_ += block;
	return *this;
}

namespace {

std::string joined(std::span<double const> v, double scale) {
	std::string s;
	for (std::size_t i = 0; i < v.size(); ++i) {
		if (i) s += ' ';
		s += format_number(v[i] / scale);
	}
	return s;
}

} // namespace

std::string trajectory_table(trajectory const& traj, mode_grid const& grid, double nu, std::string_view hash) {
	table_writer w("mean-field trajectory", hash);
	w.meta("time in drive cycles T; u, v, w Bloch components; N_n photon number of mode n");
	w.meta("omega_n/nu: " + joined(grid.frequencies(), nu));
	std::vector<std::string> cols{"t/T", "u", "v", "w"};
	for (std::size_t n = 0; n < grid.size(); ++n) cols.push_back("N_" + std::to_string(n));
	w.columns(cols);
	double const period = 2.0 * std::numbers::pi / nu;
	std::vector<double> row;
	for (std::size_t k = 0; k < traj.states.size(); ++k) {
		auto const& s = traj.states[k];
		row.assign({traj.times[k] / period, s.u(), s.v(), s.w()});
		for (double n : s.n_exp()) row.push_back(n);
		w.row(row);
	}
	return w.str();
}

std::string dipole_table(trajectory const& traj, std::string_view hash) {
	table_writer w("dipole series", hash);
	w.meta("t in units of 1/omega0 scale (hbar = 1); u = <sigma_x>, proportional to <D>");
	w.columns({"t", "u"});
	for (std::size_t k = 0; k < traj.dipole_series.size(); ++k) w.row({traj.sample_time(k), traj.dipole_series[k]});
	return w.str();
}

std::string spectrogram_table(spectrogram_data const& sg, std::string_view hash) {
	table_writer w("photon number spectrogram", hash);
	w.meta("rows: snapshots, first column t/T; remaining columns <N_n>");
	w.meta("omega_n/nu: " + joined(sg.freq_over_nu, 1.0));
	w.columns({"t/T", "N_0..N_last"});
	std::vector<double> row;
	for (std::size_t r = 0; r < sg.rows; ++r) {
		row.assign({sg.time_cycles[r]});
		for (std::size_t c = 0; c < sg.cols; ++c) row.push_back(sg.at(r, c));
		w.row(row);
	}
	return w.str();
}

std::string distribution_table(trajectory const& traj, mode_grid const& grid, double nu, std::string_view hash) {
	table_writer w("final photon number distribution", hash);
	double const period = 2.0 * std::numbers::pi / nu;
	w.meta("t/T = " + format_number(traj.times.back() / period));
	w.columns({"omega/nu", "N"});
	auto const n = traj.final_state().n_exp();
	for (std::size_t i = 0; i < grid.size(); ++i) w.row({grid.frequencies()[i] / nu, n[i]});
	return w.str();
}

std::string delta_epsilon_table(delta_epsilon_grid const& g, std::string_view hash) {
	table_writer w("quasi-energy splitting delta_epsilon/nu", hash);
	w.meta("rows: dE0/hbar omega0 (first column); columns: Delta/omega0 = (omega0 - nu)/omega0");
	w.meta("Delta/omega0: " + joined(g.detuning_over_omega0, 1.0));
	w.columns({"dE0/hbar_omega0", "delta_epsilon/nu..."});
	std::vector<double> row;
	for (std::size_t r = 0; r < g.e0_over_omega0.size(); ++r) {
		row.assign({g.e0_over_omega0[r]});
		for (std::size_t c = 0; c < g.detuning_over_omega0.size(); ++c) row.push_back(g.at(r, c));
		w.row(row);
	}
	return w.str();
}

std::string line_spectrum_table(line_spectrum const& ls, std::string_view hash) {
	table_writer w("Floquet line spectrum", hash);
	w.meta("delta_epsilon/nu = " + format_number(ls.delta_epsilon / ls.nu));
	w.meta("|alpha|^2 = " + format_number(std::norm(ls.alpha)) + ", |beta|^2 = " + format_number(std::norm(ls.beta)));
	w.meta("weight: squared line amplitude times frequency^4");
	w.columns({"frequency/nu", "weight", "label"});
	std::string body;
	for (auto const& l : ls.lines)
		body += format_number(l.frequency / ls.nu) + ' ' + format_number(l.weight) + ' ' + l.label() + '\n';
	w.text(body);
	return w.str();
}

std::string power_spectrum_table(power_spectrum_data const& s, double nu, std::string_view title,
                                 std::string_view hash) {
	table_writer w(title, hash);
	w.meta(std::string("window ") + to_string(s.window) + ", series_length " + std::to_string(s.series_length) +
	       ", fft_length " + std::to_string(s.fft_length));
	if (!std::isnan(s.ref_frequency))
		w.meta("normalized to " + format_number(s.ref_value) + " at omega/nu = " + format_number(s.ref_frequency / nu));
	w.columns({"omega/nu", "power"});
	for (std::size_t i = 0; i < s.frequencies.size(); ++i) w.row({s.frequencies[i] / nu, s.power[i]});
	return w.str();
}

std::string comparison_text(comparison_report const& r, double nu, std::string_view hash) {
	table_writer w("spectrum comparison", hash);
	std::ostringstream body;
	r.write(body, nu);
	w.text(body.str());
	return w.str();
}

std::string photon_stats_table(fock_history const& h, std::size_t mode, double period, std::string_view hash) {
	table_writer w("photon statistics of mode " + std::to_string(mode + 1), hash);
	auto const& first = h.states.front();
	w.meta("omega/nu = " + format_number(first.modes[mode].frequency * period / (2.0 * std::numbers::pi)) +
	       ", M = " + std::to_string(first.space.m_max()));
	w.meta("Q_M = nan while <N> <= " + format_number(q_floor));
	w.columns({"t/T", "N", "Q_M", "P0", "P1", "P2", "P3", "P4", "P5"});
	std::vector<double> row;
	for (std::size_t k = 0; k < h.states.size(); ++k) {
		auto const st = photon_statistics(h.states[k], mode);
		row.assign({h.times[k] / period, st.mean, st.mandel_q.value_or(std::nan(""))});
		for (std::size_t n = 0; n <= 5; ++n) row.push_back(n < st.distribution.size() ? st.distribution[n] : 0.0);
		w.row(row);
	}
	return w.str();
}

std::string g2_table(fock_history const& h, double period, std::string_view hash) {
	table_writer w("equal-time second-order correlation", hash);
	w.meta("self terms normal ordered <a+ a+ a a>/<N>^2; *_literal columns use <N N>/<N>^2; nan when a mean is <= " +
	       format_number(q_floor));
	w.columns({"t/T", "g2_11", "g2_22", "g2_12", "g2_11_literal", "g2_22_literal"});
	auto v = [](std::optional<double> x) { return x.value_or(std::nan("")); };
	for (std::size_t k = 0; k < h.states.size(); ++k) {
		auto const& s = h.states[k];
		w.row({h.times[k] / period, v(g2_equal_time(s, 0, 0)), v(g2_equal_time(s, 1, 1)), v(g2_equal_time(s, 0, 1)),
		       v(g2_equal_time_literal(s, 0, 0)), v(g2_equal_time_literal(s, 1, 1))});
	}
	return w.str();
}

std::string audit_text(audit_report const& r, std::string_view hash) {
	table_writer w("cross-term audit", hash);
	std::ostringstream body;
	body.precision(17);
	r.write(body);
	w.text(body.str());
	return w.str();
}

std::string audit_series_table(audit_report const& r, fock_history const& h, double period, std::string_view hash) {
	table_writer w("cross-term audit series", hash);
	w.columns({"t/T", "ratio"});
	for (std::size_t k = 0; k < r.ratio_series.size() && k < h.times.size(); ++k)
		w.row({h.times[k] / period, r.ratio_series[k]});
	return w.str();
}

std::vector<std::string> write_files(std::filesystem::path const& dir, std::vector<output_file> const& files) {
	std::filesystem::create_directories(dir);
	std::vector<std::string> hashes;
	for (auto const& f : files) {
		auto const path = dir / f.name;
		std::ofstream out(path, std::ios::binary | std::ios::trunc);
		out.write(f.content.data(), static_cast<std::streamsize>(f.content.size()));
		if (!out) throw std::runtime_error("cannot write " + path.string());
		hashes.push_back(sha256_hex(f.content));
	}
	return hashes;
}

} // namespace hhg
