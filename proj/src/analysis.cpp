#include "sr3t/analysis.hpp"

#include "sr3t/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

namespace sr3t::analysis {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;
using engine::format_fixed;
using sensors::format_number;

// Bands covering [z_lo, z_hi] holding `cells` cells of the global size.
void build_bands(double z_lo, double z_hi, std::size_t cells, double cell_side, std::vector<double>& edges,
                 std::vector<std::size_t>& counts) {
	const double lat_lo = std::asin(z_lo);
	const double lat_hi = std::asin(z_hi);
	auto n_bands = static_cast<std::size_t>(std::max(1.0, std::round((lat_hi - lat_lo) / cell_side)));
	n_bands = std::min(n_bands, cells);
	const double step = (lat_hi - lat_lo) / static_cast<double>(n_bands);

	std::vector<std::size_t> m(n_bands);
	double carry = 0.0;
	std::size_t used = 0;
	for (std::size_t j = 0; j < n_bands; ++j) {
		const double a = std::sin(lat_lo + step * static_cast<double>(j));
		const double b = std::sin(lat_lo + step * static_cast<double>(j + 1));
		const double ideal = static_cast<double>(cells) * (b - a) / (z_hi - z_lo);
		const std::size_t left = n_bands - j - 1; // bands still needing at least one cell
		auto mj = static_cast<std::size_t>(std::max(1.0, std::round(ideal + carry)));
		mj = std::min(mj, cells - used - left);
		if (j + 1 == n_bands)
			mj = cells - used;
		carry += ideal - static_cast<double>(mj);
		m[j] = mj;
		used += mj;
	}

	std::size_t cum = 0;
	edges.push_back(z_lo);
	for (std::size_t j = 0; j < n_bands; ++j) {
		cum += m[j];
		edges.push_back(j + 1 == n_bands ? z_hi
		                                 : z_lo + (z_hi - z_lo) * static_cast<double>(cum) / static_cast<double>(cells));
		counts.push_back(m[j]);
	}
}

} // namespace

void validate(const DirectionSet& d) {
	for (std::size_t i = 0; i < d.dirs.size(); ++i) {
		const auto& v = d.dirs[i];
		const double n = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
		if (!(std::abs(n - 1.0) <= 1e-9))
			throw InputError("direction " + std::to_string(i) + " is not a unit vector (norm " + format_number(n) + ")");
	}
}

DirectionSet read_directions_csv(const std::string& path) {
	std::ifstream is(path, std::ios::binary);
	if (!is)
		throw IoError("cannot open " + path);
	std::string line;
	if (!std::getline(is, line) || line.rfind("x,y,z", 0) != 0)
		throw InputError(path + ": expected header 'x,y,z'");
	DirectionSet d;
	int line_no = 1;
	while (std::getline(is, line)) {
		++line_no;
		if (line.empty() || line == "\r")
			continue;
		std::istringstream ls(line);
		Vec3 v;
		char c1 = 0, c2 = 0;
		if (!(ls >> v.x >> c1 >> v.y >> c2 >> v.z) || c1 != ',' || c2 != ',')
			throw InputError(path + ":" + std::to_string(line_no) + ": malformed direction");
		d.dirs.push_back(v);
	}
	validate(d);
	return d;
}

void write_directions_csv(const std::string& path, const DirectionSet& d) {
	std::ofstream os(path, std::ios::binary);
	if (!os)
		throw IoError("cannot write " + path);
	os << "x,y,z\n";
	for (const auto& v : d.dirs)
		os << format_number(v.x) << ',' << format_number(v.y) << ',' << format_number(v.z) << '\n';
}

EqualAreaGrid::EqualAreaGrid(std::size_t n_cells) : n_cells_(n_cells) {
	if (n_cells < 2)
		throw InputError("equal-area grid needs at least 2 cells");
	const double side = std::sqrt(4.0 * kPi / static_cast<double>(n_cells));
	if (n_cells % 2 == 0) {
		std::vector<double> north_edges;
		std::vector<std::size_t> north_counts;
		build_bands(0.0, 1.0, n_cells / 2, side, north_edges, north_counts);
		for (auto it = north_edges.rbegin(); it != north_edges.rend(); ++it)
			if (*it != 0.0)
				z_edges_.push_back(-*it);
		z_edges_.insert(z_edges_.end(), north_edges.begin(), north_edges.end());
		cells_per_band_.assign(north_counts.rbegin(), north_counts.rend());
		cells_per_band_.insert(cells_per_band_.end(), north_counts.begin(), north_counts.end());
	} else {
		build_bands(-1.0, 1.0, n_cells, side, z_edges_, cells_per_band_);
	}
	offsets_.resize(cells_per_band_.size());
	std::exclusive_scan(cells_per_band_.begin(), cells_per_band_.end(), offsets_.begin(), std::size_t{0});
}

double EqualAreaGrid::cell_area() const {
	return 4.0 * kPi / static_cast<double>(n_cells_);
}

std::size_t EqualAreaGrid::cell_index(const Vec3& d) const {
	const double z = std::clamp(d.z, -1.0, 1.0);
	auto it = std::upper_bound(z_edges_.begin(), z_edges_.end(), z);
	std::size_t band = it == z_edges_.begin() ? 0 : static_cast<std::size_t>(it - z_edges_.begin()) - 1;
	band = std::min(band, cells_per_band_.size() - 1);
	double phi = std::atan2(d.y, d.x);
	if (phi < 0)
		phi += 2.0 * kPi;
	const std::size_t m = cells_per_band_[band];
	auto col = static_cast<std::size_t>(phi / (2.0 * kPi) * static_cast<double>(m));
	col = std::min(col, m - 1);
	return offsets_[band] + col;
}

double solid_angle(const DirectionSet& dirs, std::size_t n_bins) {
	if (dirs.dirs.empty())
		throw InputError("solid_angle needs at least one direction");
	if (n_bins < 100)
		throw InputError("solid_angle needs n_bins >= 100");
	const EqualAreaGrid grid(n_bins);
	std::vector<bool> occupied(grid.size(), false);
	std::size_t count = 0;
	for (const auto& d : dirs.dirs) {
		const auto i = grid.cell_index(d);
		if (!occupied[i]) {
			occupied[i] = true;
			++count;
		}
	}
	return static_cast<double>(count) * grid.cell_area();
}

double workspace_from_limits(double azimuth_span_deg, double elev_min_deg, double elev_max_deg) {
	if (!(azimuth_span_deg >= 0 && azimuth_span_deg <= 360))
		throw InputError("azimuth span must be in [0, 360]");
	if (!(elev_min_deg >= -90 && elev_max_deg <= 90))
		throw InputError("elevation limits must be in [-90, 90]");
	if (elev_min_deg > elev_max_deg)
		throw InputError("elevation range is inverted");
	return azimuth_span_deg * kDeg * (std::sin(elev_max_deg * kDeg) - std::sin(elev_min_deg * kDeg));
}

double cap_solid_angle(double half_angle_deg) {
	return 2.0 * kPi * (1.0 - std::cos(half_angle_deg * kDeg));
}

Vec3 direction(double azimuth_deg, double elevation_deg) {
	const double a = azimuth_deg * kDeg;
	const double e = elevation_deg * kDeg;
	return {std::cos(e) * std::cos(a), std::cos(e) * std::sin(a), std::sin(e)};
}

DirectionSet band_sweep(double azimuth_span_deg, double elev_min_deg, double elev_max_deg, std::size_t n_samples) {
	workspace_from_limits(azimuth_span_deg, elev_min_deg, elev_max_deg); // range checks
	const double z0 = std::sin(elev_min_deg * kDeg);
	const double z1 = std::sin(elev_max_deg * kDeg);
	const double span = azimuth_span_deg * kDeg;
	// Choose rows/columns so spacing is about equal on the sphere.
	const double area = std::max(span * (z1 - z0), 1e-12);
	const double spacing = std::sqrt(area / static_cast<double>(std::max<std::size_t>(n_samples, 1)));
	const auto rows = static_cast<std::size_t>(std::max(1.0, std::round((z1 - z0) / spacing)));
	const auto cols = static_cast<std::size_t>(std::max(1.0, std::round(span / spacing)));
	DirectionSet out;
	out.dirs.reserve(rows * cols);
	for (std::size_t i = 0; i < rows; ++i) {
		const double z = z0 + (z1 - z0) * (static_cast<double>(i) + 0.5) / static_cast<double>(rows);
		const double rxy = std::sqrt(std::max(0.0, 1.0 - z * z));
		for (std::size_t j = 0; j < cols; ++j) {
			const double a = span * (static_cast<double>(j) + 0.5) / static_cast<double>(cols);
			out.dirs.push_back({rxy * std::cos(a), rxy * std::sin(a), z});
		}
	}
	return out;
}

namespace {

Vec3 normalized(const Vec3& v) {
	const double n = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
	return {v.x / n, v.y / n, v.z / n};
}

Vec3 cross(const Vec3& a, const Vec3& b) {
	return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

} // namespace

DirectionSet cap_sample(const Vec3& axis, double half_angle_deg, std::size_t n_samples, std::mt19937_64& rng) {
	if (!(half_angle_deg > 0 && half_angle_deg <= 180))
		throw InputError("cap half-angle must be in (0, 180]");
	const Vec3 w = normalized(axis);
	const Vec3 helper = std::abs(w.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
	const Vec3 u = normalized(cross(helper, w));
	const Vec3 v = cross(w, u);
	const double cmin = std::cos(half_angle_deg * kDeg);
	std::uniform_real_distribution<double> unit(0.0, 1.0);
	DirectionSet out;
	out.dirs.reserve(n_samples);
	for (std::size_t i = 0; i < n_samples; ++i) {
		const double c = 1.0 - unit(rng) * (1.0 - cmin);
		const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
		const double phi = 2.0 * kPi * unit(rng);
		const double a = s * std::cos(phi), b = s * std::sin(phi);
		out.dirs.push_back(normalized({a * u.x + b * v.x + c * w.x, a * u.y + b * v.y + c * w.y,
		                               a * u.z + b * v.z + c * w.z}));
	}
	return out;
}

DirectionSet uniform_sphere(std::size_t n_samples, std::mt19937_64& rng) {
	std::uniform_real_distribution<double> unit(0.0, 1.0);
	DirectionSet out;
	out.dirs.reserve(n_samples);
	for (std::size_t i = 0; i < n_samples; ++i) {
		const double z = 2.0 * unit(rng) - 1.0;
		const double phi = 2.0 * kPi * unit(rng);
		const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
		out.dirs.push_back({r * std::cos(phi), r * std::sin(phi), z});
	}
	return out;
}

int range_increase(const kinematics::MountPose& mount, const kinematics::FingerGeometry& geometry,
                   const control::CalibrationSet& calib, const piano::KeyboardLayout& layout,
                   const plant::MotorAxis& h_axis, double pinkie_x) {
	const auto lo = std::min(calib.enc_h_min, calib.enc_h_max);
	const auto hi = std::max(calib.enc_h_min, calib.enc_h_max);
	int count = 0;
	for (const auto& key : layout.keys()) {
		if (key.color != piano::KeyColor::white || !(key.center_x > pinkie_x))
			continue;
		try {
			const double th = kinematics::theta_for_key(key.center_x, mount, geometry);
			const auto counts = plant::encoder_counts(th, h_axis);
			if (counts >= lo && counts <= hi)
				++count;
		} catch (const ReachError&) {
		}
	}
	return count;
}

LatencyStats latency_stats(const std::vector<engine::LatencyRecord>& records, double budget_ms) {
	if (records.empty())
		throw InputError("latency statistics need at least one record");
	LatencyStats s;
	s.count = records.size();
	s.budget_ms = budget_ms;
	double sum = 0.0;
	s.max = -std::numeric_limits<double>::infinity();
	for (const auto& r : records) {
		sum += r.delay();
		s.max = std::max(s.max, r.delay());
	}
	s.mean = sum / static_cast<double>(s.count);
	if (s.count > 1) {
		double ss = 0.0;
		for (const auto& r : records)
			ss += (r.delay() - s.mean) * (r.delay() - s.mean);
		s.stddev = std::sqrt(ss / static_cast<double>(s.count - 1));
	}
	s.over_budget = s.mean > budget_ms;
	return s;
}

BudgetReport budget_check(const BudgetConfig& cfg, const kinematics::FingerGeometry& geometry,
                          const plant::MotorAxis& press_axis, const engine::LatencyConfig& latency) {
	if (!(cfg.latency_budget_ms > 0))
		throw ConfigError("budget.latency_ms must be > 0");
	if (!(cfg.mass_budget_g > 0))
		throw ConfigError("budget.mass_g must be > 0");
	if (!(cfg.device_mass_g >= 0))
		throw ConfigError("device.mass_g must be >= 0");
	if (!(cfg.key_force_n > 0))
		throw ConfigError("layout.press_force must be > 0");
	BudgetReport b;
	b.latency_budget_ms = cfg.latency_budget_ms;
	b.measured_mean_ms = cfg.measured_latency_ms.value_or(latency.total());
	b.latency_pass = b.measured_mean_ms <= cfg.latency_budget_ms;
	b.mass_budget_g = cfg.mass_budget_g;
	b.configured_mass_g = cfg.device_mass_g;
	b.mass_pass = cfg.device_mass_g <= cfg.mass_budget_g;
	b.required_torque_nm = kinematics::required_torque(cfg.key_force_n, 0.0, geometry);
	b.torque_margin = plant::torque_margin(b.required_torque_nm, press_axis);
	b.torque_pass = b.torque_margin >= 1.0;
	return b;
}

namespace {
std::string flag(bool pass) {
	return pass ? "pass" : "fail";
}
} // namespace

Report to_report(const LatencyStats& s) {
	return {{"count", std::to_string(s.count)},
	        {"mean_ms", format_fixed(s.mean, 3)},
	        {"stddev_ms", format_fixed(s.stddev, 3)},
	        {"max_ms", format_fixed(s.max, 3)},
	        {"budget_ms", format_fixed(s.budget_ms, 3)},
	        {"over_budget", s.over_budget ? "true" : "false"}};
}

Report to_report(const BudgetReport& b) {
	return {{"latency_budget_ms", format_fixed(b.latency_budget_ms, 3)},
	        {"latency_measured_ms", format_fixed(b.measured_mean_ms, 3)},
	        {"latency", flag(b.latency_pass)},
	        {"mass_budget_g", format_fixed(b.mass_budget_g, 1)},
	        {"mass_configured_g", format_fixed(b.configured_mass_g, 1)},
	        {"mass", flag(b.mass_pass)},
	        {"required_torque_mNm", format_fixed(b.required_torque_nm * 1000.0, 4)},
	        {"torque_margin", format_fixed(b.torque_margin, 4)},
	        {"torque", flag(b.torque_pass)},
	        {"all", flag(b.all_pass())}};
}

void write_report_kv(std::ostream& os, const Report& r) {
	for (const auto& [k, v] : r)
		os << k << " = " << v << '\n';
}

void write_report_text(std::ostream& os, const std::string& title, const Report& r) {
	os << title << '\n';
	std::size_t width = 0;
	for (const auto& kv : r)
		width = std::max(width, kv.first.size());
	for (const auto& [k, v] : r)
		os << "  " << k << std::string(width - k.size(), ' ') << "  " << v << '\n';
}

} // namespace sr3t::analysis
