#include <hhg/config.hpp>

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace hhg {

namespace {

using setter = std::function<void(run_config&, std::string_view)>;
using getter = std::function<std::string(run_config const&)>;

struct key_entry {
	std::string name;
	setter set;
	getter get;
};

std::string_view trim(std::string_view s) {
	auto const b = s.find_first_not_of(" \t\r");
	if (b == std::string_view::npos) return {};
	auto const e = s.find_last_not_of(" \t\r");
	return s.substr(b, e - b + 1);
}

double to_double(std::string_view v) {
	double x = 0.0;
	auto const [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
	if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(x))
		throw std::invalid_argument("expected a finite number, got '" + std::string(v) + "'");
	return x;
}

std::size_t to_count(std::string_view v) {
	std::size_t x = 0;
	auto const [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
	if (ec != std::errc{} || ptr != v.data() + v.size())
		throw std::invalid_argument("expected a non-negative integer, got '" + std::string(v) + "'");
	return x;
}

bool to_bool(std::string_view v) {
	if (v == "true" || v == "1" || v == "yes") return true;
	if (v == "false" || v == "0" || v == "no") return false;
	throw std::invalid_argument("expected true or false, got '" + std::string(v) + "'");
}

// "a, b, c" or "start:stop:count" (count >= 1 points, inclusive)
std::vector<double> to_list(std::string_view v) {
	std::vector<double> out;
	if (v.find(':') != std::string_view::npos) {
		std::vector<std::string_view> parts;
		std::size_t pos = 0;
		while (true) {
			auto const c = v.find(':', pos);
			parts.push_back(trim(v.substr(pos, c == std::string_view::npos ? c : c - pos)));
			if (c == std::string_view::npos) break;
			pos = c + 1;
		}
		if (parts.size() != 3) throw std::invalid_argument("range must be start:stop:count");
		double const a = to_double(parts[0]), b = to_double(parts[1]);
		auto const n = to_count(parts[2]);
		if (n == 0) throw std::invalid_argument("range count must be at least 1");
		if (n == 1) return {a};
		for (std::size_t i = 0; i < n; ++i) out.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
		return out;
	}
	std::size_t pos = 0;
	while (pos <= v.size()) {
		auto const c = v.find(',', pos);
		auto const item = trim(v.substr(pos, c == std::string_view::npos ? c : c - pos));
		if (item.empty()) throw std::invalid_argument("empty list element");
		out.push_back(to_double(item));
		if (c == std::string_view::npos) break;
		pos = c + 1;
	}
	return out;
}

std::string fmt(double x) {
	std::ostringstream s;
	s << std::setprecision(17) << x;
	return s.str();
}

std::string fmt_list(std::vector<double> const& v) {
	std::string s;
	for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
	return s;
}

template <typename T>
key_entry number_key(std::string name, T run_config::*member) {
	key_entry e;
	e.name = std::move(name);
	if constexpr (std::is_same_v<T, double>) {
		e.set = [member](run_config& c, std::string_view v) { c.*member = to_double(v); };
		e.get = [member](run_config const& c) { return fmt(c.*member); };
	} else if constexpr (std::is_same_v<T, std::size_t>) {
		e.set = [member](run_config& c, std::string_view v) { c.*member = to_count(v); };
		e.get = [member](run_config const& c) { return std::to_string(c.*member); };
	} else if constexpr (std::is_same_v<T, int>) {
		e.set = [member](run_config& c, std::string_view v) {
			auto const n = to_count(v);
			if (n > 100000) throw std::invalid_argument("value too large");
			c.*member = static_cast<int>(n);
		};
		e.get = [member](run_config const& c) { return std::to_string(c.*member); };
	} else if constexpr (std::is_same_v<T, bool>) {
		e.set = [member](run_config& c, std::string_view v) { c.*member = to_bool(v); };
		e.get = [member](run_config const& c) { return std::string(c.*member ? "true" : "false"); };
	} else if constexpr (std::is_same_v<T, std::string>) {
		e.set = [member](run_config& c, std::string_view v) { c.*member = std::string(v); };
		e.get = [member](run_config const& c) { return c.*member; };
	} else {
		e.set = [member](run_config& c, std::string_view v) { c.*member = to_list(v); };
		e.get = [member](run_config const& c) { return fmt_list(c.*member); };
	}
	return e;
}

std::vector<key_entry> const& key_table() {
	static std::vector<key_entry> const table = [] {
		std::vector<key_entry> t;
		t.push_back(number_key("omega0", &run_config::omega0));
		t.push_back(number_key("nu_over_omega0", &run_config::nu_over_omega0));
		t.push_back(number_key("drive_strength", &run_config::drive_strength));
		t.push_back(number_key("tau_cycles", &run_config::tau_cycles));
		t.push_back(number_key("envelope", &run_config::envelope));
		t.push_back(number_key("ramp_cycles", &run_config::ramp_cycles));
		t.push_back(number_key("n_modes", &run_config::n_modes));
		t.push_back(number_key("omega_max_over_nu", &run_config::omega_max_over_nu));
		t.push_back(number_key("coupling_scale", &run_config::coupling_scale));
		t.push_back(number_key("dt_cycles", &run_config::dt_cycles));
		t.push_back(number_key("stride", &run_config::stride));
		t.push_back(number_key("t_end_cycles", &run_config::t_end_cycles));
		t.push_back(number_key("initial_atom", &run_config::initial_atom));
		t.push_back(number_key("seed_photons", &run_config::seed_photons));
		t.push_back(number_key("seed_harmonic", &run_config::seed_harmonic));
		t.push_back(number_key("monitor_validity", &run_config::monitor_validity));
		t.push_back(number_key("validity_threshold", &run_config::validity_threshold));
		t.push_back(number_key("map_drive", &run_config::map_drive));
		t.push_back(number_key("map_detuning", &run_config::map_detuning));
		t.push_back(number_key("line_max_order", &run_config::line_max_order));
		t.push_back(number_key("window", &run_config::window));
		t.push_back(number_key("pad_factor", &run_config::pad_factor));
		t.push_back(number_key("ref_harmonic", &run_config::ref_harmonic));
		t.push_back(number_key("peak_threshold", &run_config::peak_threshold));
		t.push_back(number_key("fock_harmonics", &run_config::fock_harmonics));
		t.push_back(number_key("fock_sweep", &run_config::fock_sweep));
		t.push_back(number_key("fock_m_max", &run_config::fock_m_max));
		t.push_back(number_key("fock_dt_cycles", &run_config::fock_dt_cycles));
		t.push_back(number_key("fock_sample_every", &run_config::fock_sample_every));
		t.push_back(number_key("fock_post_cycles", &run_config::fock_post_cycles));
		t.push_back(number_key("fock_coherent_amplitude", &run_config::fock_coherent_amplitude));
		return t;
	}();
	return table;
}

void require(bool ok, std::string_view source, std::string const& key, std::string const& msg) {
	if (!ok) {
		std::ostringstream s;
		s << source << ": " << key << ": " << msg;
		throw config_error(s.str(), std::string(source), 0, key);
	}
}

} // namespace

double run_config::period() const { return 2.0 * std::numbers::pi / nu(); }

double run_config::t_end() const { return (t_end_cycles > 0.0 ? t_end_cycles : tau_cycles) * period(); }

atom_params run_config::atom() const { return atom_params(omega0); }

pulse_params run_config::pulse() const {
	envelope_kind env = envelope::sin2{};
	if (envelope == "flat_top") env = envelope::flat_top_ramp{ramp_cycles};
	else if (envelope == "pure_sine") env = envelope::pure_sine{};
	return pulse_params(drive_strength * omega0, nu(), tau_cycles * period(), env);
}

mode_grid run_config::grid() const { return build_mode_grid(n_modes, omega_max_over_nu * nu(), coupling_scale, omega0); }

window_kind run_config::window_type() const { return window == "rect" ? window_kind::rect : window_kind::hann; }

std::string run_config::canonical() const {
	std::string out;
	for (auto const& k : key_table()) out += k.name + " = " + k.get(*this) + "\n";
	return out;
}

std::string run_config::hash() const { return sha256_hex(canonical()).substr(0, 16); }

std::vector<std::string> config_keys() {
	std::vector<std::string> out;
	for (auto const& k : key_table()) out.push_back(k.name);
	return out;
}

void validate(run_config const& c, std::string_view src) {
	require(c.omega0 > 0.0, src, "omega0", "must be positive");
	require(c.nu_over_omega0 > 0.0, src, "nu_over_omega0", "must be positive");
	require(c.drive_strength >= 0.0, src, "drive_strength", "must be non-negative");
	require(c.tau_cycles > 0.0, src, "tau_cycles", "must be positive");
	require(c.envelope == "sin2" || c.envelope == "flat_top" || c.envelope == "pure_sine", src, "envelope",
	        "must be sin2, flat_top or pure_sine");
	require(c.ramp_cycles >= 0.0, src, "ramp_cycles", "must be non-negative");
	require(c.envelope != "flat_top" || 2.0 * c.ramp_cycles <= c.tau_cycles + 1e-12, src, "ramp_cycles",
	        "two ramps do not fit into tau_cycles");
	require(c.n_modes >= 1, src, "n_modes", "must be at least 1");
	require(c.omega_max_over_nu > 0.0, src, "omega_max_over_nu", "must be positive");
	require(c.coupling_scale >= 0.0, src, "coupling_scale", "must be non-negative");
	require(c.dt_cycles > 0.0 && c.dt_cycles <= 0.1, src, "dt_cycles", "must be in (0, 0.1]");
	require(c.stride >= 1, src, "stride", "must be at least 1");
	require(c.t_end_cycles >= 0.0, src, "t_end_cycles", "must be non-negative");
	require(c.initial_atom == "ground" || c.initial_atom == "excited", src, "initial_atom", "must be ground or excited");
	require(c.seed_photons >= 0.0, src, "seed_photons", "must be non-negative");
	require(c.seed_harmonic > 0.0, src, "seed_harmonic", "must be positive");
	require(c.validity_threshold > 0.0, src, "validity_threshold", "must be positive");
	require(!c.map_drive.empty(), src, "map_drive", "must not be empty");
	require(std::all_of(c.map_drive.begin(), c.map_drive.end(), [](double x) { return x >= 0.0; }), src, "map_drive",
	        "values must be non-negative");
	require(!c.map_detuning.empty(), src, "map_detuning", "must not be empty");
	require(std::all_of(c.map_detuning.begin(), c.map_detuning.end(), [](double x) { return x < 1.0; }), src,
	        "map_detuning", "values must be below 1 so that nu stays positive");
	require(c.line_max_order >= 1, src, "line_max_order", "must be at least 1");
	require(c.window == "hann" || c.window == "rect", src, "window", "must be hann or rect");
	require(c.pad_factor >= 1, src, "pad_factor", "must be at least 1");
	require(c.ref_harmonic > 0.0, src, "ref_harmonic", "must be positive");
	require(c.peak_threshold > 0.0 && c.peak_threshold < 1.0, src, "peak_threshold", "must be in (0, 1)");
	require(!c.fock_harmonics.empty(), src, "fock_harmonics", "must not be empty");
	require(std::all_of(c.fock_harmonics.begin(), c.fock_harmonics.end(), [](double x) { return x > 0.0; }), src,
	        "fock_harmonics", "values must be positive");
	require(c.fock_sweep || c.fock_harmonics.size() <= 2, src, "fock_harmonics",
	        "a joint run supports one or two modes; set fock_sweep = true for more");
	require(c.fock_m_max >= 1 && c.fock_m_max <= 60, src, "fock_m_max", "must be in [1, 60]");
	require(c.fock_dt_cycles >= 0.0, src, "fock_dt_cycles", "must be non-negative");
	require(c.fock_sample_every >= 1, src, "fock_sample_every", "must be at least 1");
	require(c.fock_post_cycles >= 0.0, src, "fock_post_cycles", "must be non-negative");
	require(c.fock_coherent_amplitude >= 0.0, src, "fock_coherent_amplitude", "must be non-negative");
}

run_config parse_config(std::string_view text, std::string_view source, run_config base) {
	std::map<std::string_view, key_entry const*> keys;
	for (auto const& k : key_table()) keys.emplace(k.name, &k);

	auto fail = [&](std::size_t line, std::string const& key, std::string const& msg) {
		std::ostringstream s;
		s << source << ":" << line << ": " << (key.empty() ? "" : key + ": ") << msg;
		throw config_error(s.str(), std::string(source), line, key);
	};

	std::set<std::string, std::less<>> seen;
	std::size_t line_no = 0;
	std::size_t pos = 0;
	while (pos < text.size()) {
		auto const nl = text.find('\n', pos);
		auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
		pos = nl == std::string_view::npos ? text.size() : nl + 1;
		++line_no;

		if (auto const hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
		auto const line = trim(raw);
		if (line.empty()) continue;

		auto const eq = line.find('=');
		if (eq == std::string_view::npos) fail(line_no, "", "expected key = value");
		std::string const key(trim(line.substr(0, eq)));
		auto const value = trim(line.substr(eq + 1));
		if (key.empty()) fail(line_no, "", "missing key");
		auto const it = keys.find(key);
		if (it == keys.end()) fail(line_no, key, "unknown key");
		if (!seen.insert(key).second) fail(line_no, key, "key given more than once");
		if (value.empty()) fail(line_no, key, "missing value");
		try {
			it->second->set(base, value);
		} catch (std::invalid_argument const& e) {
			fail(line_no, key, e.what());
		}
	}
	validate(base, source);
	return base;
}

run_config load_config_file(std::filesystem::path const& path, run_config base) {
	std::ifstream in(path, std::ios::binary);
	if (!in) throw config_error(path.string() + ": cannot open configuration file", path.string(), 0, "");
	std::ostringstream s;
	s << in.rdbuf();
	return parse_config(s.str(), path.string(), std::move(base));
}

std::string sha256_hex(std::string_view data) {
	unsigned char md[EVP_MAX_MD_SIZE];
	unsigned int len = 0;
	if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
		throw std::runtime_error("sha256: digest failed");
	std::ostringstream s;
	s << std::hex << std::setfill('0');
	for (unsigned int i = 0; i < len; ++i) s << std::setw(2) << static_cast<int>(md[i]);
	return s.str();
}

} // namespace hhg
