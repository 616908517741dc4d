// dyntomo: null-space chains, observability ranks, and trajectory recovery
// for linearly observed linear dynamics.

#include "dyntomo/dyntomo.hpp"
#include "dyntomo/demos.hpp"
#include "dyntomo/io.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace dyntomo;

namespace {

struct SystemOptions {
  std::string demo;
  std::vector<std::string> dyn_files;
  std::string proj_file;
  bool time_varying = false;
  std::uint64_t seed = 7;
};

void add_system_flags(CLI::App* cmd, SystemOptions& o) {
  cmd->add_option("--demo", o.demo,
                  std::string("built-in system: ") + demos::kNames);
  cmd->add_option("--dyn", o.dyn_files,
                  "dynamics matrix file(s); several files form the tuple "
                  "L_1,...,L_{T-1}");
  cmd->add_option("--proj", o.proj_file, "projection matrix file");
  cmd->add_flag("--time-varying", o.time_varying,
                "force tuple interpretation of a single --dyn file");
  cmd->add_option("--seed", o.seed, "seed for the random6 demo (default 7)");
}

SystemModeld load_system(const SystemOptions& o) {
  if (!o.demo.empty()) {
    if (!o.dyn_files.empty() || !o.proj_file.empty())
      throw io::input_error("--demo cannot be combined with --dyn/--proj");
    return demos::by_name(o.demo, o.seed);
  }
  if (o.dyn_files.empty() || o.proj_file.empty())
    throw io::input_error(
        "no system given: use --demo NAME or --dyn FILE... --proj FILE");
  Matrixd P = io::read_matrix(o.proj_file);
  std::vector<Matrixd> Ls;
  Ls.reserve(o.dyn_files.size());
  for (const auto& f : o.dyn_files) Ls.push_back(io::read_matrix(f));
  if (o.time_varying || Ls.size() > 1) {
    auto sys = make_system(std::move(Ls), std::move(P));
    sys.label = "files";
    return sys;
  }
  auto sys = make_system(std::move(Ls[0]), std::move(P));
  sys.label = "files";
  return sys;
}

std::string fmt(double v) { return io::format_double(v); }

void print_system_line(const SystemModeld& sys) {
  std::cout << "system: " << sys.label << " (n=" << sys.n() << ", m=" << sys.m()
            << ")\n";
}

std::string frame_name(const std::string& prefix, std::size_t t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_t%02zu.pgm", t);
  return prefix + buf;
}

// ---------------------------------------------------------------- chain ----

struct ChainOptions {
  SystemOptions sys;
  int max_steps = 0;  // 0: pick from the system
  double tol = 1e-10;
  std::string csv;
};

void run_chain(const ChainOptions& o) {
  SystemModeld sys = load_system(o.sys);
  Index steps = o.max_steps > 0
                    ? o.max_steps
                    : (sys.stationary ? sys.n() + 1
                                      : static_cast<Index>(sys.dynamics.size()) + 1);
  auto chain = compute_chain(sys, steps, RankTolerance{o.tol});
  auto report = reduction_report(chain);

  print_system_line(sys);
  std::cout << "dims:";
  for (Index d : chain.dims) std::cout << ' ' << d;
  std::cout << '\n';
  if (chain.k_star)
    std::cout << "k_star: " << *chain.k_star << '\n';
  else
    std::cout << "k_star: not reached\n";
  std::cout << "lower_bound: " << report.lower_bound << '\n';
  std::cout << "optimal: "
            << (report.optimal == OptimalStatus::Yes
                    ? "yes"
                    : report.optimal == OptimalStatus::No ? "no" : "undecided")
            << '\n';
  std::cout << "transverse:";
  if (report.transverse_profile.empty())
    std::cout << " -";
  else
    for (bool b : report.transverse_profile) std::cout << ' ' << (b ? 1 : 0);
  std::cout << '\n';
  if (auto w = stall_witness(chain))
    std::cout << "stall: at " << w->index << " (residual "
              << fmt(w->invariance_residual) << ")\n";
  else
    std::cout << "stall: none\n";
  std::cout << "conditioning_warning: " << (report.conditioning_warning ? "yes" : "no");
  if (report.conditioning_warning)
    std::cout << " (worst " << fmt(report.worst_condition) << ")";
  std::cout << '\n';

  if (!o.csv.empty()) {
    std::ostringstream out;
    out << "k,dim\n";
    for (std::size_t i = 0; i < chain.dims.size(); ++i)
      out << (i + 1) << ',' << chain.dims[i] << '\n';
    io::atomic_write(o.csv, out.str());
    std::cout << "wrote: " << o.csv << '\n';
  }
}

// ------------------------------------------------------------- simulate ----

struct SimulateOptions {
  SystemOptions sys;
  std::string x0_file;
  std::vector<double> blob;  // ci cj sigma
  int steps = 0;
  std::string prefix = "sim";
  std::string outdir = ".";
  bool images = false;
};

Vectord load_initial_state(const SystemModeld& sys, const SimulateOptions& o) {
  if (!o.x0_file.empty() && !o.blob.empty())
    throw io::input_error("give either --x0 or --blob, not both");
  if (!o.x0_file.empty()) {
    Matrixd m = io::read_matrix(o.x0_file);
    if (m.cols() == 1 && m.rows() == sys.n()) return m.col(0);
    if (m.rows() == 1 && m.cols() == sys.n()) return m.row(0).transpose();
    throw io::input_error(o.x0_file + ": expected a " + std::to_string(sys.n()) +
                          "-vector (one column or one row)");
  }
  if (!o.blob.empty()) {
    if (!sys.grid)
      throw io::input_error("--blob needs a grid demo (l1grid|l2grid)");
    return gaussian_blob(*sys.grid, o.blob[0], o.blob[1], o.blob[2]);
  }
  throw io::input_error("no initial state: use --x0 FILE or --blob CI CJ SIGMA");
}

void run_simulate(const SimulateOptions& o) {
  SystemModeld sys = load_system(o.sys);
  Vectord x0 = load_initial_state(sys, o);
  auto [traj, meas] = simulate(sys, x0, o.steps);

  fs::path dir(o.outdir);
  fs::create_directories(dir);
  print_system_line(sys);

  io::write_matrix(dir / (o.prefix + "_x0.mat"), x0);
  std::cout << "wrote: " << (dir / (o.prefix + "_x0.mat")).string() << '\n';

  fs::path data_path = dir / (o.prefix + "_data.csv");
  io::write_sequence(data_path, meas.data);
  std::cout << "wrote: " << data_path.string() << " (T=" << meas.data.size()
            << ", m=" << sys.m() << ")\n";

  if (o.images) {
    if (!sys.grid)
      throw io::input_error("--images needs a grid demo (l1grid|l2grid)");
    for (std::size_t t = 1; t <= traj.states.size(); ++t)
      io::write_pgm(dir / frame_name(o.prefix, t), *sys.grid,
                    traj.states[t - 1]);
    std::cout << "wrote: " << traj.states.size() << " frames "
              << (dir / frame_name(o.prefix, 1)).string() << " ...\n";
  }
}

// ---------------------------------------------------------- reconstruct ----

struct ReconstructOptions {
  SystemOptions sys;
  std::string data_file;
  double tol = 1e-10;
  std::string prefix = "recon";
  std::string outdir = ".";
};

void run_reconstruct(const ReconstructOptions& o) {
  SystemModeld sys = load_system(o.sys);
  auto data = io::read_sequence(o.data_file);
  for (const auto& d : data)
    if (d.size() != sys.m())
      throw io::input_error(o.data_file + ": rows have " +
                            std::to_string(d.size()) +
                            " components, system has m=" +
                            std::to_string(sys.m()));
  MeasurementSequence<double> seq{data};
  auto res = reconstruct(sys, seq, RankTolerance{o.tol});

  print_system_line(sys);
  std::cout << "T: " << data.size() << '\n';
  std::cout << "rank: " << res.rank << '\n';
  std::cout << "condition: " << fmt(res.condition) << '\n';
  std::cout << "unique: " << (res.unique ? "yes" : "no") << '\n';
  std::cout << "residual: " << fmt(res.residual) << '\n';

  fs::path dir(o.outdir);
  fs::create_directories(dir);
  fs::path x0_path = dir / (o.prefix + "_x0.mat");
  io::write_matrix(x0_path, res.x0);
  std::cout << "wrote: " << x0_path.string() << '\n';
  fs::path states_path = dir / (o.prefix + "_states.csv");
  io::write_sequence(states_path, res.trajectory.states);
  std::cout << "wrote: " << states_path.string() << '\n';
  if (sys.grid) {
    fs::path img = dir / (o.prefix + "_x0.pgm");
    io::write_pgm(img, *sys.grid, res.x0);
    std::cout << "wrote: " << img.string() << '\n';
  }
}

// ----------------------------------------------------------- experiment ----

struct ExperimentOptions {
  std::vector<std::string> genericity;  // n m trials seed
  std::vector<std::string> condstudy;   // demo Tmin Tmax
  bool time_varying = false;
  bool randomize_p = false;
  std::uint64_t seed = 7;  // random6 seed when condstudy targets it
  std::string csv;
};

long long to_int(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw io::input_error(std::string("bad ") + what + ": '" + s + "'");
  }
}

// Fraction with a guaranteed decimal point, so exact 1 prints as "1.0".
std::string fmt_fraction(double v) {
  std::string s = fmt(v);
  if (s.find('.') == std::string::npos && s.find('e') == std::string::npos)
    s += ".0";
  return s;
}

void run_experiment(const ExperimentOptions& o) {
  if (o.genericity.empty() == o.condstudy.empty())
    throw io::input_error(
        "use exactly one of --genericity N M TRIALS SEED or "
        "--condstudy DEMO TMIN TMAX");

  // Both modes print a pure-CSV report on stdout; --csv also writes the
  // per-trial (or per-T) detail rows to a file.
  if (!o.genericity.empty()) {
    Index n = to_int(o.genericity[0], "n");
    Index m = to_int(o.genericity[1], "m");
    Index trials = to_int(o.genericity[2], "trials");
    auto seed = static_cast<std::uint64_t>(to_int(o.genericity[3], "seed"));
    auto rep = genericity_experiment(n, m, trials, seed, o.time_varying,
                                     o.randomize_p);
    std::cout << "metric,value\n";
    std::cout << "n," << n << '\n';
    std::cout << "m," << m << '\n';
    std::cout << "trials," << trials << '\n';
    std::cout << "seed," << seed << '\n';
    std::cout << "time_varying," << (o.time_varying ? 1 : 0) << '\n';
    std::cout << "randomize_p," << (o.randomize_p ? 1 : 0) << '\n';
    std::cout << "count_optimal," << rep.count_optimal << '\n';
    std::cout << "count_all_transverse," << rep.count_all_transverse << '\n';
    std::cout << "count_below_lower_bound," << rep.count_below_lower_bound
              << '\n';
    std::cout << "fraction_optimal," << fmt_fraction(rep.fraction_optimal)
              << '\n';
    std::cout << "failing_seeds,";
    if (rep.failing_seeds.empty()) {
      std::cout << "none";
    } else {
      std::size_t shown = std::min<std::size_t>(rep.failing_seeds.size(), 20);
      for (std::size_t i = 0; i < shown; ++i)
        std::cout << (i ? " " : "") << rep.failing_seeds[i];
      if (shown < rep.failing_seeds.size()) std::cout << " ...";
    }
    std::cout << '\n';
    if (!o.csv.empty()) {
      std::ostringstream out;
      out << "trial,seed,k_star,optimal,all_transverse\n";
      for (std::size_t i = 0; i < rep.outcomes.size(); ++i) {
        const auto& t = rep.outcomes[i];
        out << i << ',' << t.seed << ',';
        if (t.k_star)
          out << *t.k_star;
        else
          out << "none";
        out << ',' << (t.optimal ? 1 : 0) << ',' << (t.all_transverse ? 1 : 0)
            << '\n';
      }
      io::atomic_write(o.csv, out.str());
    }
    return;
  }

  SystemModeld sys = demos::by_name(o.condstudy[0], o.seed);
  Index t_min = to_int(o.condstudy[1], "Tmin");
  Index t_max = to_int(o.condstudy[2], "Tmax");
  auto study = condition_study(sys, t_min, t_max);
  std::ostringstream out;
  out << "T,rank,condition\n";
  for (const auto& row : study.rows)
    out << row.T << ',' << row.rank << ',' << fmt(row.condition) << '\n';
  std::cout << out.str();
  if (!o.csv.empty()) io::atomic_write(o.csv, out.str());
}

// ----------------------------------------------------------- demo-paper ----

struct DemoChecks {
  int passed = 0;
  int failed = 0;
  void record(bool ok, const std::string& name, const std::string& detail) {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << ": " << detail
              << '\n';
    (ok ? passed : failed)++;
  }
};

void rank_profile_csv(const SystemModeld& sys, Index t_max,
                      const fs::path& path) {
  auto study = condition_study(sys, 1, t_max);
  std::ostringstream out;
  out << "T,rank,condition\n";
  for (const auto& row : study.rows)
    out << row.T << ',' << row.rank << ',' << fmt(row.condition) << '\n';
  io::atomic_write(path, out.str());
}

int run_demo_paper(const std::string& outdir) {
  fs::path dir(outdir);
  fs::create_directories(dir);
  DemoChecks checks;

  {  // Cyclic chain: the hand-checkable reduction.
    auto sys = demos::cyclic();
    auto chain = compute_chain(sys, 7, RankTolerance{});
    auto report = reduction_report(chain);
    std::ostringstream out;
    out << "k,dim\n";
    for (std::size_t i = 0; i < chain.dims.size(); ++i)
      out << (i + 1) << ',' << chain.dims[i] << '\n';
    io::atomic_write(dir / "cyclic_chain.csv", out.str());
    bool ok = chain.dims == std::vector<Index>{4, 3, 2, 1, 0} &&
              chain.k_star && *chain.k_star == 5 && report.lower_bound == 3 &&
              report.optimal == OptimalStatus::No;
    std::ostringstream d;
    d << "dims";
    for (Index v : chain.dims) d << ' ' << v;
    d << ", k_star " << (chain.k_star ? std::to_string(*chain.k_star) : "-")
      << ", lower bound " << report.lower_bound;
    checks.record(ok, "cyclic chain", d.str());
  }

  auto rank_check = [&](const SystemModeld& sys, const char* name,
                        const fs::path& csv) {
    auto study = condition_study(sys, 1, 10);
    rank_profile_csv(sys, 10, csv);
    bool ok = true;
    for (const auto& row : study.rows)
      ok = ok && row.rank == sys.m() * row.T;
    std::ostringstream d;
    d << "rank(E_T) for T=1..10:";
    for (const auto& row : study.rows) d << ' ' << row.rank;
    checks.record(ok, std::string(name) + " rank growth", d.str());
  };
  rank_check(demos::l1grid(), "l1grid", dir / "l1grid_rank.csv");
  rank_check(demos::l2grid(), "l2grid", dir / "l2grid_rank.csv");

  {  // Conditioning drops once extra measurements pile up.
    auto sys = demos::l2grid();
    auto study = condition_study(sys, 10, 15);
    std::ostringstream out;
    out << "T,rank,condition\n";
    for (const auto& row : study.rows)
      out << row.T << ',' << row.rank << ',' << fmt(row.condition) << '\n';
    io::atomic_write(dir / "l2grid_condition.csv", out.str());
    bool full = true;
    for (const auto& row : study.rows) full = full && row.rank == sys.n();
    double c10 = study.rows.front().condition;
    double c15 = study.rows.back().condition;
    bool ok = full && c15 <= c10 / 10.0;
    std::ostringstream d;
    d << "cond(E_10) " << fmt(c10) << " -> cond(E_15) " << fmt(c15);
    checks.record(ok, "l2grid conditioning", d.str());
  }

  {  // Recover a blob on the grid from column sums alone.
    auto sys = demos::l2grid();
    Vectord x0 = gaussian_blob(*sys.grid, 3, 3, 1.5);
    auto [traj, meas] = simulate(sys, x0, 14);
    io::write_sequence(dir / "l2grid_data.csv", meas.data);
    io::write_pgm(dir / "l2grid_x0.pgm", *sys.grid, x0);
    auto res = reconstruct(sys, meas, RankTolerance{});
    io::write_pgm(dir / "l2grid_x0_recovered.pgm", *sys.grid, res.x0);
    double rel = (res.x0 - x0).norm() / x0.norm();
    bool ok = res.unique && rel <= 1e-3;
    checks.record(ok, "l2grid blob recovery",
                  "relative error " + fmt(rel) + ", unique " +
                      (res.unique ? "yes" : "no"));
  }

  {  // Cyclic round trip is essentially exact.
    auto sys = demos::cyclic();
    Vectord x0(6);
    x0 << 1, 2, 3, 4, 5, 6;
    auto [traj, meas] = simulate(sys, x0, 6);
    auto res = reconstruct(sys, meas, RankTolerance{});
    double rel = (res.x0 - x0).norm() / x0.norm();
    bool ok = res.unique && rel <= 1e-10;
    checks.record(ok, "cyclic round trip", "relative error " + fmt(rel));
  }

  std::cout << "summary: " << checks.passed << "/"
            << (checks.passed + checks.failed) << " checks passed\n";
  std::cout << "artifacts: " << dir.string() << '\n';
  return checks.failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "dyntomo: observability diagnostics and state recovery for linearly "
      "observed linear dynamics"};
  app.require_subcommand(1);

  ChainOptions chain_opts;
  auto* chain_cmd = app.add_subcommand(
      "chain", "null-space intersection chain and reduction diagnostics");
  add_system_flags(chain_cmd, chain_opts.sys);
  chain_cmd->add_option("--max-steps", chain_opts.max_steps,
                        "chain length cap (default n+1, or tuple length + 1)")
      ->check(CLI::PositiveNumber);
  chain_cmd->add_option("--tol", chain_opts.tol,
                        "relative rank threshold (default 1e-10)");
  chain_cmd->add_option("--csv", chain_opts.csv, "write k,dim rows here");

  SimulateOptions sim_opts;
  auto* sim_cmd =
      app.add_subcommand("simulate", "run the dynamics and record projections");
  add_system_flags(sim_cmd, sim_opts.sys);
  sim_cmd->add_option("--x0", sim_opts.x0_file, "initial state (matrix file)");
  sim_cmd->add_option("--blob", sim_opts.blob,
                      "Gaussian initial state CI CJ SIGMA (grid demos)")
      ->expected(3);
  sim_cmd->add_option("--steps", sim_opts.steps, "number of time steps T")
      ->required()
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--out", sim_opts.prefix, "output file prefix");
  sim_cmd->add_option("--outdir", sim_opts.outdir, "output directory");
  sim_cmd->add_flag("--images", sim_opts.images,
                    "also write one PGM frame per step (grid demos)");

  ReconstructOptions rec_opts;
  auto* rec_cmd = app.add_subcommand(
      "reconstruct", "least-squares initial state from a measurement CSV");
  add_system_flags(rec_cmd, rec_opts.sys);
  rec_cmd->add_option("--data", rec_opts.data_file, "measurement sequence CSV")
      ->required();
  rec_cmd->add_option("--tol", rec_opts.tol,
                      "relative rank threshold (default 1e-10)");
  rec_cmd->add_option("--out", rec_opts.prefix, "output file prefix");
  rec_cmd->add_option("--outdir", rec_opts.outdir, "output directory");

  ExperimentOptions exp_opts;
  auto* exp_cmd = app.add_subcommand(
      "experiment", "Monte-Carlo genericity study or conditioning sweep");
  exp_cmd->add_option("--genericity", exp_opts.genericity,
                      "random-system study: N M TRIALS SEED")
      ->expected(4);
  exp_cmd->add_option("--condstudy", exp_opts.condstudy,
                      "extended-matrix sweep: DEMO TMIN TMAX")
      ->expected(3);
  exp_cmd->add_flag("--time-varying", exp_opts.time_varying,
                    "draw a fresh dynamics block per step");
  exp_cmd->add_flag("--randomize-p", exp_opts.randomize_p,
                    "draw a Gaussian projection per trial");
  exp_cmd->add_option("--seed", exp_opts.seed,
                      "seed for the random6 demo (default 7)");
  exp_cmd->add_option(
      "--csv", exp_opts.csv,
      "write detail rows here (genericity columns: "
      "trial,seed,k_star,optimal,all_transverse; condstudy columns: "
      "T,rank,condition)");

  std::string demo_outdir = "demo_out";
  auto* paper_cmd = app.add_subcommand(
      "demo-paper", "run the full worked-example suite and check its claims");
  paper_cmd->add_option("--outdir", demo_outdir, "artifact directory");

  int rc = 0;
  chain_cmd->callback([&] { run_chain(chain_opts); });
  sim_cmd->callback([&] { run_simulate(sim_opts); });
  rec_cmd->callback([&] { run_reconstruct(rec_opts); });
  exp_cmd->callback([&] { run_experiment(exp_opts); });
  paper_cmd->callback([&] { rc = run_demo_paper(demo_outdir); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const io::input_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
  return rc;
}
