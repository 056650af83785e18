#ifndef HHG_IO_HPP
#define HHG_IO_HPP

#include <hhg/floquet.hpp>
#include <hhg/fock.hpp>
#include <hhg/meanfield.hpp>
#include <hhg/spectra.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace hhg {

// Shortest round-trip decimal form; "nan" for NaN.
std::string format_number(double x);

// Whitespace-delimited text with '#' header lines. Every file starts with
//   # <title>
//   # config_hash <hash>
// followed by free-form metadata lines and one "# columns: ..." line.
class table_writer {
public:
	table_writer(std::string_view title, std::string_view config_hash);

	table_writer& meta(std::string_view line);
	table_writer& columns(std::vector<std::string> const& names);
	table_writer& row(std::vector<double> const& values);
	table_writer& text(std::string_view block);

	std::string const& str() const { return buf_; }

private:
	std::string buf_;
};

// t/T, u, v, w, <N_n>...; header lists omega_n / nu.
std::string trajectory_table(trajectory const& traj, mode_grid const& grid, double nu, std::string_view hash);
// t, u at full integration resolution
std::string dipole_table(trajectory const& traj, std::string_view hash);
// rows t/T, columns omega_n/nu
std::string spectrogram_table(spectrogram_data const& sg, std::string_view hash);
// omega_n/nu, <N_n> of the final snapshot
std::string distribution_table(trajectory const& traj, mode_grid const& grid, double nu, std::string_view hash);

// rows dE0/hbar omega0, columns Delta/omega0
std::string delta_epsilon_table(delta_epsilon_grid const& g, std::string_view hash);
// frequency/nu, weight, label
std::string line_spectrum_table(line_spectrum const& ls, std::string_view hash);

// omega/nu, power
std::string power_spectrum_table(power_spectrum_data const& s, double nu, std::string_view title,
                                 std::string_view hash);
std::string comparison_text(comparison_report const& r, double nu, std::string_view hash);

// t/T, <N>, Q_M (nan when undefined), P_0..P_5
std::string photon_stats_table(fock_history const& h, std::size_t mode, double period, std::string_view hash);
// t/T, g2_11, g2_22, g2_12 (normal-ordered self terms) and the literal self terms
std::string g2_table(fock_history const& h, double period, std::string_view hash);
std::string audit_text(audit_report const& r, std::string_view hash);
// t/T, neglected/kept ratio
std::string audit_series_table(audit_report const& r, fock_history const& h, double period, std::string_view hash);

struct output_file {
	std::string name;
	std::string content;
};

// Writes each file under dir (created if needed) and returns their SHA-256.
std::vector<std::string> write_files(std::filesystem::path const& dir, std::vector<output_file> const& files);

} // namespace hhg

#endif
