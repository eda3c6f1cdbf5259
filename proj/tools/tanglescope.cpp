// tanglescope command-line front end.
//
// Exit codes: 0 success, 1 configuration or argument error, 2 numerical failure.

#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "self_test.hpp"
#include "tanglescope/tanglescope.hpp"

using namespace tanglescope;

namespace {

struct SystemArgs {
  std::string config;
  std::vector<double> epsilon;
  double degeneracy_rel_tol = 1e-9;
};

void add_system_options(CLI::App* app, SystemArgs& args) {
  app->add_option("--config", args.config, "Configuration file (system section is used); default: the 4-qubit system");
  app->add_option("--epsilon", args.epsilon, "Override biases eps_i in mK, one per qubit")->delimiter(',');
  app->add_option("--degeneracy-tol", args.degeneracy_rel_tol, "Relative degeneracy tolerance")
      ->check(CLI::Range(0.0, 0.5));
}

SpinHamiltonian default_system() {
  SpinHamiltonian h = SpinHamiltonian::uncoupled({147, 12, 163, 165}, {0, 0, 0, 0});
  h.couplings = {{{0, 1}, 163}, {{2, 3}, 163}, {{0, 3}, 155}, {{1, 2}, 155}, {{0, 2}, -62}, {{1, 3}, -62}};
  return h;
}

SpinHamiltonian load_system(const SystemArgs& args, double* degeneracy = nullptr, double* purity = nullptr) {
  SpinHamiltonian h = default_system();
  if (!args.config.empty()) {
    const Config cfg = parse_config(args.config);
    h = cfg.system;
    if (degeneracy) *degeneracy = cfg.physics.degeneracy_rel_tol;
    if (purity) *purity = cfg.physics.purity_tol;
  }
  if (!args.epsilon.empty()) {
    if (args.epsilon.size() != h.qubits)
      throw ConfigError({fmt::format("--epsilon: expected {} values, got {}", h.qubits, args.epsilon.size())});
    h.epsilon = args.epsilon;
  }
  return h;
}

struct Solved {
  SpinHamiltonian system;
  Spectrum spectrum;
  MomentMatrices moments;
  double purity_tol = 1e-8;
};

Solved solve_system(const SystemArgs& args) {
  double degeneracy = args.degeneracy_rel_tol, purity = 1e-8;
  const auto h = load_system(args, &degeneracy, &purity);
  DiagonalizeOptions opts;
  opts.degeneracy_rel_tol = degeneracy;
  auto spectrum = solve(h, opts);
  auto moments = moment_matrices(spectrum);
  return {h, std::move(spectrum), std::move(moments), purity};
}

std::string num(double x) {
  if (x == 0.0) x = 0.0;
  return fmt::format("{:.12g}", x);
}

std::string set_text(const QubitSet& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i] + 1);
  return out + "}";
}

std::string partition_text(const ClusterPartition& p) {
  std::string out;
  for (const auto& b : p.blocks) out += set_text(b);
  return out;
}

std::vector<std::size_t> to_zero_based(const std::vector<std::size_t>& qubits, const char* what) {
  std::vector<std::size_t> out;
  for (auto q : qubits) {
    if (q < 1) throw ConfigError({fmt::format("{}: qubit numbers start at 1", what)});
    out.push_back(q - 1);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equilibrium entanglement signatures for small pseudospin systems"};
  app.require_subcommand(0, 1);
  bool self_test = false;
  app.add_flag("--self-test", self_test, "Run the brute-force oracle suite and exit");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Evaluate |Z^0_4| and R(psi_0) over the configured bias grid");
  std::string sweep_config, sweep_out, sweep_plot;
  std::size_t sweep_jobs = 1;
  std::uint64_t sweep_seed = 0;
  std::optional<double> sweep_temperature;
  sweep->add_option("--config", sweep_config, "Configuration file")->required();
  sweep->add_option("--out", sweep_out, "CSV output path (default: output.csv from config)");
  sweep->add_option("--plot", sweep_plot, "Gnuplot script path (default: output.plot_script from config)");
  sweep->add_option("--jobs", sweep_jobs, "Worker threads (0 = all cores)");
  sweep->add_option("--seed", sweep_seed, "Accepted for interface uniformity; the sweep is deterministic");
  sweep->add_option("--temperature", sweep_temperature, "Adds a thermal Z4 column at this T (mK)")
      ->check(CLI::PositiveNumber);

  // spectrum
  SystemArgs spectrum_args;
  auto* spectrum_cmd = app.add_subcommand("spectrum", "Eigenenergies and diagonal moments");
  add_system_options(spectrum_cmd, spectrum_args);

  // signature
  SystemArgs sig_args;
  std::size_t sig_order = 4;
  double sig_temperature = 10.0;
  bool sig_unnormalized = false;
  auto* sig_cmd = app.add_subcommand("signature", "Per-state and thermal Z_N signatures");
  add_system_options(sig_cmd, sig_args);
  sig_cmd->add_option("--order", sig_order, "Signature order N >= 2")->check(CLI::Range(2, 12));
  sig_cmd->add_option("--temperature", sig_temperature, "Temperature in mK")->check(CLI::PositiveNumber);
  sig_cmd->add_flag("--unnormalized", sig_unnormalized, "Omit the partition-function normalization");

  // chi2
  SystemArgs chi_args;
  double chi_omega = 0.0, chi_omega_prime = 0.0, chi_temperature = 10.0;
  std::optional<double> chi_broadening;
  auto* chi_cmd = app.add_subcommand("chi2", "Quadratic susceptibility and its static split");
  add_system_options(chi_cmd, chi_args);
  chi_cmd->add_option("--omega", chi_omega, "omega in mK (hbar = 1)");
  chi_cmd->add_option("--omega-prime", chi_omega_prime, "omega' in mK");
  chi_cmd->add_option("--temperature", chi_temperature, "Temperature in mK")->check(CLI::PositiveNumber);
  chi_cmd->add_option("--broadening", chi_broadening, "eta in mK (default 1e-6 x smallest gap)");

  // clusters
  SystemArgs cl_args;
  auto* cl_cmd = app.add_subcommand("clusters", "Eigenstate partitions, maximal clusters, nesting check");
  add_system_options(cl_cmd, cl_args);

  // correlator
  SystemArgs corr_args;
  std::vector<std::size_t> corr_string, corr_labels;
  std::vector<double> corr_times;
  auto* corr_cmd = app.add_subcommand("correlator", "Chain correlator, classification and global irreducible value");
  add_system_options(corr_cmd, corr_args);
  corr_cmd->add_option("--string", corr_string, "Qubit numbers j_1..j_N (1-based)")->delimiter(',')->required();
  corr_cmd->add_option("--labels", corr_labels, "Eigenstate labels p_1..p_N (0 = ground)")->delimiter(',');
  corr_cmd->add_option("--times", corr_times, "Times t_1..t_N in 1/mK for <p_1|S_1(t_1)..S_N(t_N)|p_1>")
      ->delimiter(',');

  // scaling
  std::string sc_mode = "exact";
  std::size_t sc_qubits = 8, sc_clusters = 2, sc_order = 4, sc_jobs = 1, sc_block = 3;
  std::uint64_t sc_seed = 0, sc_trials = 1000000;
  std::vector<std::size_t> sc_decay;
  auto* sc_cmd = app.add_subcommand("scaling", "String counting on synthetic cluster structures");
  sc_cmd->add_option("--mode", sc_mode, "exact or mc")->check(CLI::IsMember({"exact", "mc"}));
  sc_cmd->add_option("--qubits", sc_qubits, "M")->check(CLI::PositiveNumber);
  sc_cmd->add_option("--clusters", sc_clusters, "Q (balanced blocks)")->check(CLI::PositiveNumber);
  sc_cmd->add_option("--order", sc_order, "String length N")->check(CLI::PositiveNumber);
  sc_cmd->add_option("--trials", sc_trials, "Monte Carlo samples per configuration");
  sc_cmd->add_option("--seed", sc_seed, "Monte Carlo seed");
  sc_cmd->add_option("--jobs", sc_jobs, "Worker threads (0 = all cores)");
  sc_cmd->add_option("--decay", sc_decay, "Cluster counts Q for a decay fit (uniform blocks)")->delimiter(',');
  sc_cmd->add_option("--block-size", sc_block, "Block size for --decay")->check(CLI::PositiveNumber);

  // entanglement
  SystemArgs ent_args;
  std::size_t ent_state = 0;
  auto* ent_cmd = app.add_subcommand("entanglement", "Bipartition eta, Love R and Meyer-Wallach for an eigenstate");
  add_system_options(ent_cmd, ent_args);
  ent_cmd->add_option("--state", ent_state, "Eigenstate label (0 = ground)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (self_test) return cli::run_self_test(stdout) == 0 ? 0 : 2;

    if (*sweep) {
      Config cfg = parse_config(sweep_config);
      if (sweep_temperature) cfg.physics.temperature = sweep_temperature;
      const std::string out = !sweep_out.empty() ? sweep_out : (!cfg.output.csv.empty() ? cfg.output.csv : "sweep.csv");
      const std::string plot = !sweep_plot.empty() ? sweep_plot : cfg.output.plot_script;
      if (!cfg.bias_given) fmt::print(stderr, "note: using bias map \"{}\"\n", cfg.bias.label);
      const auto table = run_sweep(cfg, sweep_jobs);
      emit_outputs(table, out, plot, stderr);
      fmt::print(stderr, "wrote {} rows to {}\n", table.rows.size(), out);
      return 0;
    }

    if (*spectrum_cmd) {
      const auto s = solve_system(spectrum_args);
      fmt::print("n,E_mK,mu_nn\n");
      for (std::size_t n = 0; n < s.spectrum.size(); ++n)
        fmt::print("{},{},{}\n", n, num(s.spectrum.energy(n)), num(s.moments.mu(n, n)));
      fmt::print("# smallest gap {} mK, degeneracy tolerance {} mK\n", num(s.spectrum.smallest_gap()),
                 num(s.spectrum.degeneracy_tol));
      return 0;
    }

    if (*sig_cmd) {
      const auto s = solve_system(sig_args);
      const auto r = thermal_signature(sig_order, s.spectrum, s.moments, sig_temperature, !sig_unnormalized);
      fmt::print("n,E_mK,Z_{}\n", sig_order);
      for (std::size_t n = 0; n < s.spectrum.size(); ++n)
        fmt::print("{},{},{}\n", n, num(s.spectrum.energy(n)), num(r.per_state[n]));
      fmt::print("# thermal Z_{} at T={} mK: {} ({})\n", sig_order, num(r.temperature), num(r.thermal),
                 r.normalized ? "normalized" : "unnormalized, weights exp(-(E_n-E_0)/T)");
      fmt::print("# partition function (shifted) {}, ground energy {} mK, excluded degenerate terms {}\n",
                 num(r.partition_function), num(r.ground_energy), r.excluded_terms);
      return 0;
    }

    if (*chi_cmd) {
      const auto s = solve_system(chi_args);
      const double eta = chi_broadening ? *chi_broadening : default_broadening(s.spectrum);
      const auto r = chi2({chi_omega, chi_omega_prime, eta}, s.spectrum, s.moments, chi_temperature);
      fmt::print("n,rho_n,chi_re,chi_im,chi0A,chi0B,chi0_total\n");
      for (std::size_t n = 0; n < s.spectrum.size(); ++n) {
        const auto split = static_split(n, s.spectrum, s.moments);
        fmt::print("{},{},{},{},{},{},{}\n", n, num(r.occupation[n]), num(r.per_state[n].real()),
                   num(r.per_state[n].imag()), num(split.chi0A), num(split.chi0B), num(split.total));
      }
      fmt::print("# thermal chi_zz({}, {}): re {} im {} at T={} mK, eta={} mK\n", num(chi_omega), num(chi_omega_prime),
                 num(r.thermal.real()), num(r.thermal.imag()), num(chi_temperature), num(eta));
      return 0;
    }

    if (*cl_cmd) {
      const auto s = solve_system(cl_args);
      ClusterOptions opts;
      opts.purity_tol = s.purity_tol;
      const auto parts = eigenstate_partitions(s.spectrum, opts);
      for (const auto& p : parts)
        fmt::print("state {}: {}{}\n", *p.eigenstate, partition_text(p), p.borderline ? "  [borderline]" : "");
      const auto maximal = maximal_clusters(parts);
      fmt::print("maximal clusters: {}\n", partition_text(maximal));
      fmt::print("largest maximal cluster: {}\n", maximal.largest_block());
      const auto doll = russian_doll_check(parts);
      if (doll.satisfied) {
        fmt::print("russian-doll condition: satisfied\n");
      } else {
        const auto& v = *doll.violation;
        fmt::print("russian-doll condition: violated between states {} and {}, qubits a={} b={} c={}\n",
                   v.first_eigenstate.value_or(v.first_partition), v.second_eigenstate.value_or(v.second_partition),
                   v.a + 1, v.b + 1, v.c + 1);
      }
      return 0;
    }

    if (*corr_cmd) {
      const auto s = solve_system(corr_args);
      const IndexString str{to_zero_based(corr_string, "--string")};
      str.validate(s.system.qubits);
      const auto maximal = maximal_clusters(eigenstate_partitions(s.spectrum));
      const auto cls = classify_string(str, maximal);
      std::string subs;
      for (const auto& sub : cls.substrings) {
        subs += "[";
        for (std::size_t i = 0; i < sub.positions.size(); ++i)
          subs += (i ? "," : "") + std::to_string(str[sub.positions[i]] + 1);
        subs += "]";
      }
      fmt::print("partition: {}\n", partition_text(maximal));
      fmt::print("substrings: {}\n", subs);
      fmt::print("verdict: {}{}\n", cls.verdict == Verdict::Joint ? "joint" : "disjoint",
                 cls.single_cluster() ? " (single cluster)" : "");
      if (!corr_labels.empty()) {
        const LabelChain chain{corr_labels};
        fmt::print("chain value: {}\n", num(chain_value(str, chain, s.moments)));
        if (chain.irreducible())
          fmt::print("global irreducible C_{}: {}\n", chain.size(), num(global_irreducible(chain, s.spectrum, s.moments)));
        else
          fmt::print("global irreducible: labels repeat, not irreducible\n");
      }
      if (!corr_times.empty()) {
        const std::size_t p = corr_labels.empty() ? 0 : corr_labels.front();
        const auto c = heisenberg_correlator(str, corr_times, p, s.spectrum, s.moments);
        fmt::print("C_N(times, |{}>): re {} im {}\n", p, num(c.real()), num(c.imag()));
      }
      return 0;
    }

    if (*sc_cmd) {
      if (!sc_decay.empty()) {
        const auto r = decay_experiment(sc_order, sc_decay, sc_block, sc_trials, sc_seed, sc_jobs);
        fmt::print("Q,M,trials,disjoint,fraction,stderr,bound_fraction\n");
        for (const auto& row : r.rows)
          fmt::print("{},{},{},{},{},{},{}\n", row.clusters, row.qubits, row.counts.total, row.counts.disjoint,
                     num(row.counts.disjoint_fraction()), num(row.counts.disjoint_stderr), num(row.bound_fraction));
        fmt::print("# alpha = {} +- {}\n", num(r.alpha), num(r.alpha_stderr));
        return 0;
      }
      const auto sys = SyntheticSystem::balanced(sc_qubits, sc_clusters);
      CountOptions o;
      o.mode = sc_mode == "mc" ? CountMode::MonteCarlo : CountMode::Exact;
      o.trials = sc_trials;
      o.seed = sc_seed;
      o.jobs = sc_jobs;
      const auto c = count_strings(sys, sc_order, o);
      fmt::print("mode,total,single_cluster,joint,disjoint,disjoint_fraction,bound\n");
      fmt::print("{},{},{},{},{},{},{}\n", c.exact ? "exact" : "mc", c.total, c.single_cluster, c.joint, c.disjoint,
                 num(c.disjoint_fraction()), num(disjoint_bound(sc_qubits, sc_order, sc_clusters)));
      if (!c.exact)
        fmt::print("# 95% interval for disjoint fraction: [{}, {}]\n", num(c.disjoint_ci_low), num(c.disjoint_ci_high));
      fmt::print("# repeated-index fraction: {}\n", num(repeated_fraction(sc_qubits, sc_order)));
      return 0;
    }

    if (*ent_cmd) {
      const auto s = solve_system(ent_args);
      if (ent_state >= s.spectrum.size()) throw std::out_of_range("--state out of range");
      const auto psi = PureState::eigenstate(s.spectrum, ent_state);
      fmt::print("subset,eta\n");
      for (auto cut : bipartitions(psi.qubits()))
        fmt::print("\"{}\",{}\n", set_text(from_mask(cut)), num(eta(psi, from_mask(cut))));
      if (psi.qubits() >= 2) {
        fmt::print("# R = {}\n", num(love_R(psi)));
        fmt::print("# Meyer-Wallach = {}\n", num(meyer_wallach(psi)));
      }
      return 0;
    }

    fmt::print("{}", app.help());
    return 0;
  } catch (const ConfigError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  } catch (const NumericalError& e) {
    fmt::print(stderr, "numerical failure: {}\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  } catch (const std::out_of_range& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  } catch (const std::length_error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    fmt::print(stderr, "failure: {}\n", e.what());
    return 2;
  }
}
