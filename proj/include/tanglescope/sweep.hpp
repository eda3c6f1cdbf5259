#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "tanglescope/config.hpp"
#include "tanglescope/entanglement.hpp"
#include "tanglescope/signatures.hpp"
#include "tanglescope/spectral.hpp"

namespace tanglescope {

struct SweepRow {
  double i_b2 = 0.0;
  double i_bt = 0.0;
  double ground_energy = 0.0;
  double z4 = 0.0;
  double z4_abs_norm = 0.0;
  double love_r = 0.0;
  std::optional<double> z4_thermal;
};

struct SweepTable {
  std::size_t bt_steps = 0;
  std::vector<double> b2_values;
  std::vector<SweepRow> rows;  // ordered by (I_b2, I_bT)
  std::vector<std::string> warnings;
  bool thermal = false;

  /// Rows belonging to the r-th I_b2 value.
  const SweepRow* row_begin(std::size_t r) const { return rows.data() + r * bt_steps; }
};

/// Single grid point: eps from the bias map, diagonalize, then Z^0_4, R(psi_0)
/// and optionally the thermal Z_4. Normalization is left to run_sweep.
inline SweepRow evaluate_point(const Config& config, double i_b2, double i_bt) {
  SpinHamiltonian h = config.system;
  h.epsilon = config.bias.epsilon(i_bt, i_b2);
  DiagonalizeOptions opts;
  opts.degeneracy_rel_tol = config.physics.degeneracy_rel_tol;
  const Spectrum spectrum = solve(h, opts);
  const MomentMatrices moments = moment_matrices(spectrum);

  SweepRow row;
  row.i_b2 = i_b2;
  row.i_bt = i_bt;
  row.ground_energy = spectrum.energy(0);
  row.z4 = z4_ground(spectrum, moments);
  row.love_r = love_R(PureState::eigenstate(spectrum, 0));
  if (config.physics.temperature)
    row.z4_thermal = thermal_signature(4, spectrum, moments, *config.physics.temperature).thermal;
  return row;
}

/// Evaluates the whole grid (points in parallel when jobs > 1) and normalizes
/// |Z^0_4| per I_b2 row. Output does not depend on jobs.
inline SweepTable run_sweep(const Config& config, std::size_t jobs = 1) {
  if (!config.sweep) throw ConfigError({"sweep: section required for a sweep run"});
  if (config.system.qubits < 2) throw ConfigError({"system.qubits: a sweep needs at least 2 qubits"});
  if (config.bias.alpha.size() != config.system.qubits)
    throw ConfigError({"bias_map: needs one coefficient per qubit"});
  const SweepGrid& grid = *config.sweep;

  SweepTable table;
  table.bt_steps = grid.bt_steps;
  table.b2_values = grid.b2_values;
  table.thermal = config.physics.temperature.has_value();
  const std::size_t total = grid.points();
  table.rows.resize(total);

  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min(jobs, total);
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(total);
  auto work = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      const double b2 = grid.b2_values[i / grid.bt_steps];
      const double bt = grid.bt_value(i % grid.bt_steps);
      try {
        table.rows[i] = evaluate_point(config, b2, bt);
      } catch (const std::exception& e) {
        errors[i] = std::make_exception_ptr(
            NumericalError(fmt::format("at I_b2={:.12g} uA, I_bT={:.12g} uA: {}", b2, bt, e.what())));
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  for (std::size_t r = 0; r < grid.b2_values.size(); ++r) {
    auto first = table.rows.begin() + static_cast<std::ptrdiff_t>(r * grid.bt_steps);
    auto last = first + static_cast<std::ptrdiff_t>(grid.bt_steps);
    double peak = 0.0;
    for (auto it = first; it != last; ++it) peak = std::max(peak, std::abs(it->z4));
    if (peak == 0.0) {
      table.warnings.push_back(
          fmt::format("row I_b2={:.12g} uA: max |Z4| is 0, normalized column set to 0", grid.b2_values[r]));
      for (auto it = first; it != last; ++it) it->z4_abs_norm = 0.0;
    } else {
      for (auto it = first; it != last; ++it) it->z4_abs_norm = std::abs(it->z4) / peak;
    }
  }
  return table;
}

namespace detail {

inline std::string csv_number(double x) {
  if (x == 0.0) x = 0.0;  // drop the sign of -0
  return fmt::format("{:.12g}", x);
}

}  // namespace detail

inline std::string format_csv(const SweepTable& table) {
  std::string out = "I_b2_uA,I_bT_uA,E0_mK,Z4,Z4_abs_norm,R_ground";
  if (table.thermal) out += ",Z4_thermal";
  out += '\n';
  for (const auto& row : table.rows) {
    out += detail::csv_number(row.i_b2);
    for (double x : {row.i_bt, row.ground_energy, row.z4, row.z4_abs_norm, row.love_r}) {
      out += ',';
      out += detail::csv_number(x);
    }
    if (table.thermal) {
      out += ',';
      out += detail::csv_number(row.z4_thermal.value_or(0.0));
    }
    out += '\n';
  }
  return out;
}

/// Gnuplot script overlaying Z4_abs_norm and R_ground per I_b2 row.
inline std::string format_plot_script(const SweepTable& table, const std::string& csv_path) {
  const std::size_t rows = table.b2_values.size();
  const std::size_t cols = rows > 4 ? 2 : 1;
  const std::size_t lines = (rows + cols - 1) / cols;
  std::string s;
  s += "# gnuplot script: normalized |Z4| and R(psi0) versus I_bT, one panel per I_b2\n";
  s += "set datafile separator ','\n";
  s += "set terminal pngcairo size 1000,1200\n";
  s += "set output 'sweep.png'\n";
  s += "set key top right\n";
  s += "set yrange [0:1.05]\n";
  s += fmt::format("set multiplot layout {},{}\n", lines, cols);
  for (double b2 : table.b2_values) {
    const std::string v = detail::csv_number(b2);
    s += fmt::format("set title 'I_b2 = {} uA'\n", v);
    s += fmt::format(
        "plot '{0}' every ::1 using 2:($1=={1} ? $5 : 1/0) with lines title '|Z4|/max', \\\n"
        "     '{0}' every ::1 using 2:($1=={1} ? $6 : 1/0) with lines title 'R'\n",
        csv_path, v);
  }
  s += "unset multiplot\n";
  return s;
}

/// Writes the CSV (and the plot script when a path is given). Warnings go to
/// `diagnostics` when non-null.
inline void emit_outputs(const SweepTable& table, const std::string& csv_path, const std::string& plot_path = "",
                         std::FILE* diagnostics = nullptr) {
  if (table.rows.empty()) throw std::invalid_argument("empty sweep table");
  auto write = [](const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << body;
    if (!out.good()) throw std::runtime_error("write failed for " + path);
  };
  write(csv_path, format_csv(table));
  if (!plot_path.empty()) write(plot_path, format_plot_script(table, csv_path));
  if (diagnostics)
    for (const auto& w : table.warnings) fmt::print(diagnostics, "warning: {}\n", w);
}

/// Interior strict local maxima; a plateau higher than both outer neighbours
/// counts once, at its leftmost point.
inline std::vector<std::size_t> find_peaks(const std::vector<double>& values) {
  std::vector<std::size_t> peaks;
  const std::size_t n = values.size();
  std::size_t i = 1;
  while (i + 1 < n) {
    if (values[i] > values[i - 1]) {
      std::size_t j = i;
      while (j + 1 < n && values[j + 1] == values[i]) ++j;
      if (j + 1 < n && values[j + 1] < values[i]) peaks.push_back(i);
      i = j + 1;
    } else {
      ++i;
    }
  }
  return peaks;
}

struct PeakReport {
  std::size_t z_peaks = 0, r_peaks = 0;
  std::size_t z_matched = 0, r_matched = 0;  // peaks with a partner within the window

  /// Share of all detected peaks (both curves) that have a partner.
  double fraction() const {
    const std::size_t all = z_peaks + r_peaks;
    return all ? static_cast<double>(z_matched + r_matched) / static_cast<double>(all) : 1.0;
  }
  double r_anchored() const { return r_peaks ? static_cast<double>(r_matched) / static_cast<double>(r_peaks) : 1.0; }
  double z_anchored() const { return z_peaks ? static_cast<double>(z_matched) / static_cast<double>(z_peaks) : 1.0; }
};

/// Per-row peak matching between normalized |Z^0_4| and R(psi_0).
inline PeakReport peak_coincidence(const SweepTable& table, std::size_t window = 2) {
  PeakReport rep;
  auto near = [window](std::size_t a, const std::vector<std::size_t>& others) {
    for (auto b : others)
      if ((a > b ? a - b : b - a) <= window) return true;
    return false;
  };
  for (std::size_t r = 0; r < table.b2_values.size(); ++r) {
    std::vector<double> z(table.bt_steps), love(table.bt_steps);
    const SweepRow* row = table.row_begin(r);
    for (std::size_t k = 0; k < table.bt_steps; ++k) {
      z[k] = row[k].z4_abs_norm;
      love[k] = row[k].love_r;
    }
    const auto zp = find_peaks(z);
    const auto rp = find_peaks(love);
    rep.z_peaks += zp.size();
    rep.r_peaks += rp.size();
    for (auto p : zp) rep.z_matched += near(p, rp);
    for (auto p : rp) rep.r_matched += near(p, zp);
  }
  return rep;
}

}  // namespace tanglescope
