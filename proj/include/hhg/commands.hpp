#ifndef HHG_COMMANDS_HPP
#define HHG_COMMANDS_HPP

#include <hhg/config.hpp>
#include <hhg/io.hpp>

#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace hhg {

struct command_options {
	unsigned threads = 1;
	std::function<void(std::string_view)> warn;
};

struct command_result {
	std::vector<output_file> files;
	std::size_t steps = 0;
	std::vector<std::string> warnings;
};

command_result run_simulate(run_config const& cfg, command_options const& opt);
command_result run_floquet_map(run_config const& cfg, command_options const& opt);
command_result run_spectrum(run_config const& cfg, command_options const& opt);
command_result run_photon_stats(run_config const& cfg, command_options const& opt);
command_result run_audit(run_config const& cfg, command_options const& opt);

// Post-pulse summary of a single-mode run: extrema of Q_M over the whole run
// and the minimum and mean of Q_M for t >= tau.
struct mandel_summary {
	double harmonic = 0.0;
	double q_min = 0.0;
	double q_max = 0.0;
	double post_min = 0.0;
	double post_mean = 0.0;
	std::size_t undefined_samples = 0;
};

mandel_summary summarize_mandel(fock_history const& h, double harmonic, double tau);

// Fock modes for the configured harmonics.
std::vector<fock_mode> fock_modes(run_config const& cfg, std::vector<double> const& harmonics);
fock_history run_fock(run_config const& cfg, std::vector<double> const& harmonics);

// Command-line entry point; returns the process exit code (0 success,
// 2 configuration error, 3 numerical abort, 1 other failures).
int run_cli(int argc, char const* const* argv, std::ostream& out, std::ostream& err);

} // namespace hhg

#endif
