#pragma once

#include "sr3t/control.hpp"
#include "sr3t/engine.hpp"
#include "sr3t/kinematics.hpp"
#include "sr3t/piano.hpp"
#include "sr3t/plant.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace sr3t::analysis {

using kinematics::Vec3;

/// Unit vectors from a pivot to tracked end points.
struct DirectionSet {
	std::vector<Vec3> dirs;
};

/// Throws InputError if any vector's norm is off by more than 1e-9.
void validate(const DirectionSet& d);

DirectionSet read_directions_csv(const std::string& path);
void write_directions_csv(const std::string& path, const DirectionSet& d);

/// Sphere split into latitude bands, each band split evenly in longitude.
/// Every cell covers exactly 4*pi/n_cells sr. Cells are roughly square; for
/// even counts the equator is a band edge.
class EqualAreaGrid {
public:
	explicit EqualAreaGrid(std::size_t n_cells);

	std::size_t size() const { return n_cells_; }
	std::size_t band_count() const { return cells_per_band_.size(); }
	double cell_area() const;
	std::size_t cell_index(const Vec3& unit_dir) const;

	/// z (sine of latitude) edges, ascending, band_count() + 1 values.
	const std::vector<double>& z_edges() const { return z_edges_; }
	const std::vector<std::size_t>& cells_per_band() const { return cells_per_band_; }

private:
	std::size_t n_cells_;
	std::vector<double> z_edges_;
	std::vector<std::size_t> cells_per_band_;
	std::vector<std::size_t> offsets_;
};

/// Occupied cells times the cell area. Needs >= 1 direction, n_bins >= 100.
double solid_angle(const DirectionSet& dirs, std::size_t n_bins);

/// Analytic solid angle of an azimuth span times an elevation band.
double workspace_from_limits(double azimuth_span_deg, double elev_min_deg, double elev_max_deg);

/// Spherical cap solid angle for a half-angle.
double cap_solid_angle(double half_angle_deg);

/// Direction from azimuth/elevation in degrees.
Vec3 direction(double azimuth_deg, double elevation_deg);

/// Dense grid sweep of an azimuth span and elevation band, with samples
/// spaced evenly in sin(elevation) so density is uniform on the sphere.
DirectionSet band_sweep(double azimuth_span_deg, double elev_min_deg, double elev_max_deg, std::size_t n_samples);

/// Uniform random directions inside a cap around `axis`.
DirectionSet cap_sample(const Vec3& axis, double half_angle_deg, std::size_t n_samples, std::mt19937_64& rng);

/// Uniform random directions on the sphere.
DirectionSet uniform_sphere(std::size_t n_samples, std::mt19937_64& rng);

/// White keys right of pinkie_x whose centres the hovering tip can reach
/// inside the calibrated horizontal encoder range.
int range_increase(const kinematics::MountPose& mount, const kinematics::FingerGeometry& geometry,
                   const control::CalibrationSet& calib, const piano::KeyboardLayout& layout,
                   const plant::MotorAxis& h_axis, double pinkie_x);

struct LatencyStats {
	std::size_t count = 0;
	double mean = 0.0;
	double stddev = 0.0;
	double max = 0.0;
	double budget_ms = 80.0;
	bool over_budget = false;
};

/// Throws InputError on an empty record set.
LatencyStats latency_stats(const std::vector<engine::LatencyRecord>& records, double budget_ms = 80.0);

struct BudgetConfig {
	double latency_budget_ms = 80.0;
	double mass_budget_g = 350.0;
	double device_mass_g = 310.0;
	double key_force_n = 0.5;
	std::optional<double> measured_latency_ms; // falls back to the summed stage delays
};

struct BudgetReport {
	double latency_budget_ms = 0.0;
	double measured_mean_ms = 0.0;
	bool latency_pass = false;
	double mass_budget_g = 0.0;
	double configured_mass_g = 0.0;
	bool mass_pass = false;
	double required_torque_nm = 0.0;
	double torque_margin = 0.0;
	bool torque_pass = false;

	bool all_pass() const { return latency_pass && mass_pass && torque_pass; }
};

BudgetReport budget_check(const BudgetConfig& cfg, const kinematics::FingerGeometry& geometry,
                          const plant::MotorAxis& press_axis, const engine::LatencyConfig& latency);

/// Ordered key/value pairs for machine-readable reports.
using Report = std::vector<std::pair<std::string, std::string>>;

Report to_report(const LatencyStats& s);
Report to_report(const BudgetReport& b);

void write_report_kv(std::ostream& os, const Report& r);
void write_report_text(std::ostream& os, const std::string& title, const Report& r);

} // namespace sr3t::analysis
