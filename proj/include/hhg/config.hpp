#ifndef HHG_CONFIG_HPP
#define HHG_CONFIG_HPP

#include <hhg/model.hpp>
#include <hhg/spectra.hpp>

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hhg {

class config_error : public std::runtime_error {
public:
	config_error(std::string const& what, std::string source, std::size_t line, std::string key)
	    : std::runtime_error(what), source_(std::move(source)), line_(line), key_(std::move(key)) {}

	std::string const& source() const { return source_; }
	std::size_t line() const { return line_; } // 0 when not tied to a line
	std::string const& key() const { return key_; }

private:
	std::string source_;
	std::size_t line_;
	std::string key_;
};

// Flat run configuration. Frequencies are in units of omega0 or nu as the
// key names say; times are in drive cycles T = 2 pi / nu.
struct run_config {
	// atom, pulse, mode grid
	double omega0 = 1.0;
	double nu_over_omega0 = 1.0;
	double drive_strength = 0.0; // d E0 / hbar omega0
	double tau_cycles = 12.0;
	std::string envelope = "sin2"; // sin2 | flat_top | pure_sine
	double ramp_cycles = 5.0;
	std::size_t n_modes = 600;
	double omega_max_over_nu = 30.0;
	double coupling_scale = 1e-3;

	// mean-field integration
	double dt_cycles = 1e-3;
	std::size_t stride = 50;
	double t_end_cycles = 0.0; // 0 means tau_cycles
	std::string initial_atom = "ground"; // ground | excited
	double seed_photons = 0.0;           // initial <N> of the mode nearest seed_harmonic
	double seed_harmonic = 1.0;          // in units of nu
	bool monitor_validity = true;
	double validity_threshold = 1e-3;

	// floquet map and line spectrum
	std::vector<double> map_drive = {0.0};    // d E0 / hbar omega0, rows
	std::vector<double> map_detuning = {0.0}; // (omega0 - nu) / omega0, columns
	int line_max_order = 60;

	// spectra
	std::string window = "hann"; // hann | rect
	std::size_t pad_factor = 4;
	double ref_harmonic = 9.0;
	double peak_threshold = 1e-6;

	// Fock solver
	std::vector<double> fock_harmonics = {8.0}; // mode frequencies in units of nu
	bool fock_sweep = false; // one single-mode job per harmonic instead of a joint run
	std::size_t fock_m_max = 10;
	double fock_dt_cycles = 0.0; // 0 selects the automatic step
	std::size_t fock_sample_every = 20;
	double fock_post_cycles = 20.0;
	double fock_coherent_amplitude = 0.0; // real amplitude of an initial coherent state in every mode

	double nu() const { return nu_over_omega0 * omega0; }
	double period() const;
	double t_end() const;

	atom_params atom() const;
	pulse_params pulse() const;
	mode_grid grid() const;
	window_kind window_type() const;

	// key = value lines for every key in a fixed order, values printed with
	// full precision; the config hash is taken over this text.
	std::string canonical() const;
	// first 16 hex digits of the SHA-256 of canonical()
	std::string hash() const;
};

// Applies the key = value lines of `text` on top of `base`. Blank lines and
// '#' comments are skipped. Unknown keys, repeated keys, malformed values
// and failed validation throw config_error.
run_config parse_config(std::string_view text, std::string_view source, run_config base = {});
run_config load_config_file(std::filesystem::path const& path, run_config base = {});

// Range checks across keys; throws config_error naming the offending key.
void validate(run_config const& cfg, std::string_view source);

std::vector<std::string> config_keys();

// Embedded recipes.
std::vector<std::string> preset_names();
// throws config_error for an unknown name
std::string_view preset_text(std::string_view name);

std::string sha256_hex(std::string_view data);

} // namespace hhg

#endif
