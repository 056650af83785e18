#include <hhg/commands.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace hhg {

namespace {

std::string harmonic_tag(double h) {
	std::ostringstream s;
	if (h == std::floor(h) && h < 1000) s << 'h' << std::setw(2) << std::setfill('0') << static_cast<int>(h);
	else s << 'h' << format_number(h);
	return s.str();
}

struct warning_sink {
	command_options const& opt;
	command_result& res;
	std::mutex mtx;

	void operator()(std::string_view msg) {
		std::lock_guard lock(mtx);
		res.warnings.emplace_back(msg);
		if (opt.warn) opt.warn(msg);
	}
};

meanfield_state initial_meanfield(run_config const& cfg, mode_grid const& grid) {
	auto s = cfg.initial_atom == "excited" ? meanfield_state::excited(grid.size()) : meanfield_state::ground(grid.size());
	if (cfg.seed_photons > 0.0) s.n_exp()[grid.nearest(cfg.seed_harmonic * cfg.nu())] = cfg.seed_photons;
	return s;
}

trajectory run_meanfield(run_config const& cfg, mode_grid const& grid, warning_sink& sink) {
	integrate_options o;
	o.t_end = cfg.t_end();
	o.dt = cfg.dt_cycles * cfg.period();
	o.stride = cfg.stride;
	o.monitor_validity = cfg.monitor_validity;
	o.validity_threshold = cfg.validity_threshold;
	o.warn = [&](std::string_view m) { sink(m); };
	return integrate(initial_meanfield(cfg, grid), cfg.pulse(), grid, cfg.atom(), o);
}

cvec2 initial_atom_vector(run_config const& cfg) {
	return cfg.initial_atom == "excited" ? excited_state() : ground_state();
}

} // namespace

std::vector<fock_mode> fock_modes(run_config const& cfg, std::vector<double> const& harmonics) {
	std::vector<fock_mode> modes;
	for (double h : harmonics) {
		double const w = h * cfg.nu();
		modes.push_back({w, cfg.coupling_scale * cfg.omega0 * std::sqrt(w / cfg.omega0)});
	}
	return modes;
}

fock_history run_fock(run_config const& cfg, std::vector<double> const& harmonics) {
	fock_space space(harmonics.size(), cfg.fock_m_max);
	auto const modes = fock_modes(cfg, harmonics);
	std::vector<std::vector<cplx>> amps(
	    harmonics.size(), cfg.fock_coherent_amplitude > 0.0
	                          ? coherent_amplitudes(cfg.fock_m_max, cplx(cfg.fock_coherent_amplitude, 0.0))
	                          : number_amplitudes(cfg.fock_m_max, 0));
	std::array<cplx, 2> atom = cfg.initial_atom == "excited" ? std::array<cplx, 2>{1.0, 0.0} : std::array<cplx, 2>{0.0, 1.0};
	auto const initial = make_product_state(space, modes, amps, atom);

	evolve_options o;
	o.t_end = (cfg.tau_cycles + cfg.fock_post_cycles) * cfg.period();
	o.dt = cfg.fock_dt_cycles * cfg.period();
	o.sample_every = cfg.fock_sample_every;
	return evolve(initial, cfg.pulse(), cfg.atom(), o);
}

mandel_summary summarize_mandel(fock_history const& h, double harmonic, double tau) {
	mandel_summary m;
	m.harmonic = harmonic;
	m.q_min = std::numeric_limits<double>::infinity();
	m.q_max = -std::numeric_limits<double>::infinity();
	m.post_min = std::numeric_limits<double>::infinity();
	double sum = 0.0;
	std::size_t count = 0;
	for (std::size_t k = 0; k < h.states.size(); ++k) {
		auto const st = photon_statistics(h.states[k], 0);
		if (!st.mandel_q) {
			++m.undefined_samples;
			continue;
		}
		double const q = *st.mandel_q;
		m.q_min = std::min(m.q_min, q);
		m.q_max = std::max(m.q_max, q);
		if (h.times[k] >= tau) {
			m.post_min = std::min(m.post_min, q);
			sum += q;
			++count;
		}
	}
	m.post_mean = count ? sum / static_cast<double>(count) : std::nan("");
	if (!count) m.post_min = std::nan("");
	return m;
}

command_result run_simulate(run_config const& cfg, command_options const& opt) {
	command_result res;
	warning_sink sink{opt, res, {}};
	auto const grid = cfg.grid();
	auto const traj = run_meanfield(cfg, grid, sink);
	res.steps = traj.steps;
	auto const h = cfg.hash();
	res.files.push_back({"trajectory.dat", trajectory_table(traj, grid, cfg.nu(), h)});
	res.files.push_back({"dipole.dat", dipole_table(traj, h)});
	if (traj.states.size() >= 2) res.files.push_back({"spectrogram.dat", spectrogram_table(spectrogram(traj, grid, cfg.nu()), h)});
	res.files.push_back({"final_distribution.dat", distribution_table(traj, grid, cfg.nu(), h)});
	return res;
}

command_result run_floquet_map(run_config const& cfg, command_options const& opt) {
	command_result res;
	auto const g = delta_epsilon_map(cfg.atom(), cfg.map_drive, cfg.map_detuning, opt.threads);
	res.steps = g.values.size();
	for (std::size_t i = 0; i < g.values.size(); ++i)
		if (!std::isfinite(g.values[i])) throw numerical_error("non-finite quasi-energy splitting in the map", 0.0, i);
	res.files.push_back({"delta_epsilon_map.dat", delta_epsilon_table(g, cfg.hash())});
	return res;
}

command_result run_spectrum(run_config const& cfg, command_options const& opt) {
	command_result res;
	warning_sink sink{opt, res, {}};
	auto const grid = cfg.grid();
	auto const traj = run_meanfield(cfg, grid, sink);
	res.steps = traj.steps;
	double const nu = cfg.nu();
	double const ref = cfg.ref_harmonic * nu;

	auto const acc = dipole_acceleration(traj, cfg.atom(), cfg.pulse());
	auto power = power_spectrum(acc, traj.dt, cfg.window_type(), cfg.pad_factor);
	auto photons = photon_distribution_spectrum(grid, traj.final_state().n_exp());
	auto const report = compare_spectra(photons, power, ref, cfg.peak_threshold);
	power.normalize_at(ref);
	photons.normalize_at(ref);

	line_spectrum_options lo;
	lo.max_order = cfg.line_max_order;
	auto const lines = floquet_line_spectrum(cfg.atom(), cfg.drive_strength * cfg.omega0, nu, initial_atom_vector(cfg), lo);

	auto const h = cfg.hash();
	res.files.push_back({"power_spectrum.dat", power_spectrum_table(power, nu, "dipole acceleration power spectrum", h)});
	res.files.push_back({"photon_spectrum.dat", power_spectrum_table(photons, nu, "final photon number distribution", h)});
	res.files.push_back({"comparison.txt", comparison_text(report, nu, h)});
	res.files.push_back({"floquet_lines.dat", line_spectrum_table(lines, h)});
	return res;
}

command_result run_photon_stats(run_config const& cfg, command_options const& opt) {
	command_result res;
	auto const h = cfg.hash();
	double const period = cfg.period();

	if (!cfg.fock_sweep) {
		auto const hist = run_fock(cfg, cfg.fock_harmonics);
		res.steps = hist.steps;
		for (std::size_t m = 0; m < cfg.fock_harmonics.size(); ++m)
			res.files.push_back({"stats_" + harmonic_tag(cfg.fock_harmonics[m]) + ".dat", photon_stats_table(hist, m, period, h)});
		if (cfg.fock_harmonics.size() == 2) {
			res.files.push_back({"g2.dat", g2_table(hist, period, h)});
			warning_sink sink{opt, res, {}};
			auto const rep = cross_term_audit(hist, [&](std::string_view m) { sink(m); });
			res.files.push_back({"audit.txt", audit_text(rep, h)});
		}
		return res;
	}

	// independent single-mode jobs; results land in per-job slots
	auto const& hs = cfg.fock_harmonics;
	std::vector<std::string> tables(hs.size());
	std::vector<mandel_summary> summaries(hs.size());
	std::vector<std::size_t> steps(hs.size());
	std::vector<std::exception_ptr> errors(hs.size());
	std::atomic<std::size_t> next{0};
	auto worker = [&] {
		for (std::size_t i = next++; i < hs.size(); i = next++) {
			try {
				auto const hist = run_fock(cfg, {hs[i]});
				tables[i] = photon_stats_table(hist, 0, period, h);
				summaries[i] = summarize_mandel(hist, hs[i], cfg.tau_cycles * period);
				steps[i] = hist.steps;
			} catch (...) {
				errors[i] = std::current_exception();
			}
		}
	};
	{
		unsigned const n = std::clamp<unsigned>(opt.threads, 1u, static_cast<unsigned>(hs.size()));
		std::vector<std::jthread> pool;
		for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
		worker();
	}
	for (auto const& e : errors)
		if (e) std::rethrow_exception(e);

	table_writer w("Mandel parameter summary per harmonic", h);
	w.meta("post-pulse: t >= tau, up to tau + " + format_number(cfg.fock_post_cycles) + " T");
	w.columns({"omega/nu", "Q_min", "Q_max", "Q_post_min", "Q_post_mean", "undefined_samples"});
	for (std::size_t i = 0; i < hs.size(); ++i) {
		auto const& s = summaries[i];
		w.row({s.harmonic, s.q_min, s.q_max, s.post_min, s.post_mean, static_cast<double>(s.undefined_samples)});
		res.files.push_back({"stats_" + harmonic_tag(hs[i]) + ".dat", tables[i]});
		res.steps += steps[i];
	}
	res.files.push_back({"mandel_summary.dat", w.str()});
	return res;
}

command_result run_audit(run_config const& cfg, command_options const& opt) {
	if (cfg.fock_harmonics.size() != 2 || cfg.fock_sweep)
		throw config_error("audit: fock_harmonics must list exactly two modes and fock_sweep must be false", "", 0,
		                   "fock_harmonics");
	command_result res;
	warning_sink sink{opt, res, {}};
	auto const hist = run_fock(cfg, cfg.fock_harmonics);
	res.steps = hist.steps;
	auto const rep = cross_term_audit(hist, [&](std::string_view m) { sink(m); });
	auto const h = cfg.hash();
	res.files.push_back({"audit.txt", audit_text(rep, h)});
	res.files.push_back({"audit_series.dat", audit_series_table(rep, hist, cfg.period(), h)});
	return res;
}

namespace {

nlohmann::ordered_json config_json(run_config const& cfg) {
	nlohmann::ordered_json j;
	std::istringstream in(cfg.canonical());
	for (std::string line; std::getline(in, line);) {
		auto const eq = line.find(" = ");
		j[line.substr(0, eq)] = line.substr(eq + 3);
	}
	return j;
}

} // namespace

int run_cli(int argc, char const* const* argv, std::ostream& out, std::ostream& err) {
	CLI::App app{"Quantum-optical high-harmonic generation from a driven two-level atom"};
	app.require_subcommand(1);

	std::string config_path, preset, out_dir = "out";
	unsigned threads = 1;
	std::size_t stride = 0;
	bool list_presets = false;
	app.add_flag("--list-presets", list_presets, "Print the embedded preset names and exit");

	struct sub {
		std::string name;
		std::string help;
		command_result (*run)(run_config const&, command_options const&);
	};
	std::vector<sub> const subs{
	    {"simulate", "Mean-field run: trajectory, spectrogram and final distribution", run_simulate},
	    {"floquet-map", "Quasi-energy splitting over drive amplitude and detuning", run_floquet_map},
	    {"spectrum", "Dipole-acceleration power spectrum, photon spectrum and Floquet lines", run_spectrum},
	    {"photon-stats", "Fock-space photon statistics, g2 and audit", run_photon_stats},
	    {"audit", "Two-mode cross-term audit of the factorized equations", run_audit},
	};
	std::vector<CLI::App*> handles;
	for (auto const& s : subs) {
		auto* c = app.add_subcommand(s.name, s.help);
		c->add_option("--config", config_path, "Configuration file (key = value lines)");
		c->add_option("--preset", preset, "Embedded preset applied before --config");
		c->add_option("--out", out_dir, "Output directory")->capture_default_str();
		c->add_option("--threads", threads, "Worker threads for sweeps")->check(CLI::Range(1u, 1024u));
		c->add_option("--stride", stride, "Snapshot stride override")->check(CLI::PositiveNumber);
		handles.push_back(c);
	}

	// --list-presets works without a subcommand
	for (int i = 1; i < argc; ++i)
		if (std::string_view(argv[i]) == "--list-presets") {
			for (auto const& n : preset_names()) out << n << '\n';
			return 0;
		}

	try {
		app.parse(argc, argv);
	} catch (CLI::CallForHelp const& e) {
		out << app.help();
		return 0;
	} catch (CLI::CallForAllHelp const& e) {
		out << app.help("", CLI::AppFormatMode::All);
		return 0;
	} catch (CLI::ParseError const& e) {
		err << "error: " << e.what() << '\n';
		return 2;
	}

	std::size_t which = 0;
	while (!handles[which]->parsed()) ++which;
	auto const& cmd = subs[which];

	try {
		if (preset.empty() && config_path.empty())
			throw config_error("either --preset or --config is required", "", 0, "");
		run_config cfg;
		if (!preset.empty()) cfg = parse_config(preset_text(preset), "preset:" + preset);
		if (!config_path.empty()) cfg = load_config_file(config_path, cfg);
		if (stride > 0) {
			cfg.stride = stride;
			validate(cfg, "--stride");
		}

		command_options opt;
		opt.threads = threads;
		opt.warn = [&](std::string_view m) { err << "warning: " << m << '\n'; };

		auto const t0 = std::chrono::steady_clock::now();
		auto res = cmd.run(cfg, opt);
		double const wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

		auto const hashes = write_files(out_dir, res.files);
		nlohmann::ordered_json m;
		m["command"] = cmd.name;
		m["preset"] = preset;
		m["config_file"] = config_path;
		m["config_hash"] = cfg.hash();
		m["config"] = config_json(cfg);
		m["output_directory"] = out_dir;
		m["files"] = nlohmann::ordered_json::array();
		for (std::size_t i = 0; i < res.files.size(); ++i)
			m["files"].push_back({{"name", res.files[i].name}, {"sha256", hashes[i]}, {"bytes", res.files[i].content.size()}});
		m["steps"] = res.steps;
		m["threads"] = threads;
		m["wall_clock_seconds"] = wall;
		m["warnings"] = res.warnings;
		write_files(out_dir, {{"manifest.json", m.dump(2) + "\n"}});
		out << cmd.name << ": wrote " << res.files.size() + 1 << " files to " << out_dir << " (config " << cfg.hash()
		    << ", " << res.steps << " steps, " << std::fixed << std::setprecision(2) << wall << " s)\n";
		return 0;
	} catch (config_error const& e) {
		err << "config error: " << e.what() << '\n';
		return 2;
	} catch (numerical_error const& e) {
		err << "numerical abort: " << e.what() << '\n';
		return 3;
	} catch (std::exception const& e) {
		err << "error: " << e.what() << '\n';
		return 1;
	}
}

} // namespace hhg
