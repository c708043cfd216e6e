#include "wcpd/cli.hpp"

#include "wcpd/errors.hpp"
#include "wcpd/image.hpp"
#include "wcpd/problems.hpp"
#include "wcpd/solver.hpp"
#include "wcpd/trace_io.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

namespace wcpd::cli {

std::vector<std::pair<std::string, std::string>> read_config(std::string const &path)
{
  std::ifstream in(path);
  if (!in) { throw IoError("cannot open config file " + path); }
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    auto const b = s.find_first_not_of(" \t\r");
    auto const e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') { continue; }
    auto const eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(fmt::format("{}:{}: expected key=value", path, lineno));
    }
    entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return entries;
}

std::vector<std::string> expand_config(std::vector<std::string> args)
{
  std::optional<std::string> file;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      file = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + 2));
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (!file) { return args; }

  // Insert right after the (sub)command words.
  std::size_t at = 0;
  if (at < args.size() && args[at].rfind("-", 0) != 0) {
    bool const nested = args[at] == "image";
    ++at;
    if (nested && at < args.size() && args[at].rfind("-", 0) != 0) { ++at; }
  }
  std::vector<std::string> injected;
  for (auto const &[key, value] : read_config(*file)) {
    injected.push_back("--" + key);
    if (value != "true") { injected.push_back(value); }
  }
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), injected.begin(), injected.end());
  return args;
}

namespace {

struct SolveArgs
{
  std::string experiment;
  std::optional<std::uint64_t> seed;
  std::optional<int> iters;
  std::optional<double> sigma, tau, theta;
  std::optional<std::string> regime;
  std::optional<std::string> start;
  std::optional<Index> n, m;
  std::optional<double> density;
  std::string noise = "constant";
  int starts = 1;
  std::optional<std::string> out;
  std::optional<double> residual_tol, dist_tol;
};

struct SharpnessArgs
{
  std::string example;
  std::optional<double> mu;
  std::optional<std::vector<double>> box;
  double step = 0.01;
  std::optional<std::string> out;
};

struct ImageArgs
{
  std::string input, output;
  std::optional<std::uint64_t> seed;
  std::optional<int> iters;
  std::optional<std::string> model;
  std::optional<double> lambda;
  double noise = 0.1;
  std::optional<double> target;
  double blur_std = 4.0;
  double eps = 0.01;
  std::optional<std::string> trace;
  std::optional<std::string> noisy_out;
};

struct PhantomArgs
{
  Index n = 64;
  std::string output;
  bool ascii = false;
};

std::string join(std::vector<std::string> const &names)
{
  std::string s;
  for (auto const &n : names) { s += (s.empty() ? "" : ", ") + n; }
  return s;
}

std::filesystem::path indexed_path(std::filesystem::path const &base, int k, int total)
{
  if (total <= 1) { return base; }
  auto p = base;
  p.replace_filename(fmt::format("{}_{}{}", base.stem().string(), k, base.extension().string()));
  return p;
}

void apply_step_overrides(ExperimentSpec &spec, SolveArgs const &a)
{
  if (a.sigma) { spec.steps.sigma = *a.sigma; }
  if (a.tau) { spec.steps.tau = *a.tau; }
  if (a.theta) { spec.steps.theta = *a.theta; }
  if (a.regime) { spec.regime = regime_from_string(*a.regime); }
  if (a.iters) { spec.iters = *a.iters; }
}

struct RunResult
{
  std::string summary;
  int code = kOk;
};

RunResult run_one(ExperimentSpec const &spec, int k, int total, SolveArgs const &a)
{
  Rng rng(start_seed(*spec.seed, static_cast<std::uint64_t>(k)));
  PrimalDual const z0 = make_start(spec, rng);

  SolveOptions opts;
  opts.stop.max_iters = spec.iters;
  opts.stop.residual_tol = a.residual_tol;
  opts.stop.dist_tol = a.dist_tol;
  opts.enforce_regime = spec.enforce_regime;
  opts.seed = spec.seed;
  opts.keep_rows = false;

  std::optional<TraceWriter> writer;
  std::filesystem::path trace_path, meta_path;
  auto meta = trace_metadata(spec.name, spec.regime, spec.steps, spec.seed);
  meta["start_index"] = std::to_string(k);
  if (a.out) {
    trace_path = indexed_path(*a.out, k, total);
    meta_path = metadata_path(trace_path);
    write_metadata(meta_path, meta);
    writer.emplace(trace_path);
    opts.on_row = [&](TraceRow const &row, Vec const &, Vec const &) { writer->write(row); };
  }

  auto const trace = solve(spec.problem, spec.regime, spec.steps, z0, opts);
  auto const &last = trace.rows.back();
  if (writer) {
    meta["iterations"] = std::to_string(trace.iterations);
    meta["stop_reason"] = to_string(trace.stop_reason);
    writer->finish(meta, meta_path);
  }

  std::string s = fmt::format("run={} iterations={} stop={}", k, trace.iterations, to_string(trace.stop_reason));
  if (last.dist) { s += " final_dist=" + format_double(*last.dist); }
  if (last.objective) { s += " objective=" + format_double(*last.objective); }
  if (trace.x.size() == 1 && trace.y.size() == 1) {
    s += fmt::format(" x={} y={}", format_double(trace.x[0]), format_double(trace.y[0]));
  }
  return {s, kOk};
}

int cmd_solve(SolveArgs const &a, std::ostream &out, std::ostream &err)
{
  auto const names = experiment_names();
  if (std::find(names.begin(), names.end(), a.experiment) == names.end()) {
    err << "unknown experiment '" << a.experiment << "'; known: " << join(names) << '\n';
    return kUnknown;
  }
  if (!a.seed) {
    err << "solve " << a.experiment << " is randomized: --seed is required\n";
    return kUsage;
  }
  if (a.starts < 1) {
    err << "--starts must be >= 1\n";
    return kUsage;
  }

  ExperimentOptions eo;
  eo.seed = a.seed;
  if (a.n) { eo.l1.n = *a.n; }
  if (a.m) { eo.l1.m = *a.m; }
  if (a.density) { eo.l1.density = *a.density; }
  if (a.noise == "uniform") {
    eo.l1.noise = L1Noise::UniformScaled;
  } else if (a.noise != "constant") {
    err << "--noise must be constant or uniform\n";
    return kUsage;
  }
  if (a.start) {
    auto const &s = *a.start;
    if (s == "inside") {
      eo.side = StartSide::Inside;
    } else if (s == "outside") {
      eo.side = StartSide::Outside;
    } else if (s == "zeros") {
      eo.l1.start = StartKind::Zeros;
    } else if (s == "scaled") {
      eo.l1.start = StartKind::ScaledSolution;
    } else {
      err << "--start must be inside, outside, zeros or scaled\n";
      return kUsage;
    }
  }

  ExperimentSpec spec = build_experiment(a.experiment, eo);
  apply_step_overrides(spec, a);
  auto const check = validate_steps(spec.steps, spec.problem.f.rho(), spec.problem.L.norm_bound(), spec.regime,
                                    spec.enforce_regime);
  if (!check.ok) {
    err << "stepsize violation: " << check.predicate << " fails (lhs = " << format_double(check.lhs) << ")\n";
    return kStepsize;
  }

  std::vector<RunResult> results(static_cast<std::size_t>(a.starts));
  std::vector<std::exception_ptr> errors(results.size());
  unsigned const workers =
    std::min<unsigned>(static_cast<unsigned>(a.starts), std::max(1u, std::thread::hardware_concurrency()));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k = next++; k < a.starts; k = next++) {
      try {
        results[static_cast<std::size_t>(k)] = run_one(spec, k, a.starts, a);
      } catch (...) {
        errors[static_cast<std::size_t>(k)] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) { pool.emplace_back(worker); }
  worker();
  for (auto &t : pool) { t.join(); }

  out << "experiment=" << spec.name << " regime=" << to_string(spec.regime) << " sigma=" << spec.steps.sigma
      << " tau=" << spec.steps.tau << " theta=" << spec.steps.theta << " seed=" << *spec.seed << '\n';
  for (std::size_t k = 0; k < results.size(); ++k) {
    if (errors[k]) { std::rethrow_exception(errors[k]); }
    out << results[k].summary << '\n';
  }
  return kOk;
}

std::optional<ExperimentSpec> sharpness_example(std::string const &name)
{
  if (name == "example1") { return example_abs_split(); }
  if (name == "example2") { return example_quadratic_dual(); }
  if (name == "example3") { return example_abs_bilinear(); }
  if (name == "example4") { return example_wc_quartic(); }
  if (name == "example4-variant") { return example_wc_quartic_variant(); }
  return std::nullopt;
}

Box2 default_sharpness_box(std::string const &name)
{
  if (name == "example1") { return {-5, 5, -5, 5}; }
  if (name == "example2") { return {-1, 1, -1, 1}; }
  return {-3, 3, -3, 3};
}

int cmd_sharpness(SharpnessArgs const &a, std::ostream &out, std::ostream &err)
{
  auto spec = sharpness_example(a.example);
  if (!spec) {
    err << "unknown example '" << a.example
        << "'; known: example1, example2, example3, example4, example4-variant\n";
    return kUnknown;
  }
  Box2 box = default_sharpness_box(a.example);
  if (a.box) {
    auto const &b = *a.box;
    if (b.size() == 2) {
      box = {b[0], b[1], b[0], b[1]};
    } else if (b.size() == 4) {
      box = {b[0], b[1], b[2], b[3]};
    } else {
      err << "--box takes lo,hi or xlo,xhi,ylo,yhi\n";
      return kUsage;
    }
  }
  double const mu = a.mu.value_or(spec->mu.value_or(1.0));
  auto const report = verify_inf_sharpness(spec->problem, mu, box, a.step, a.out.has_value());
  if (a.out) { write_contour_csv(*a.out, report.contour); }
  out << fmt::format("example={} mu={} min={} witness=({},{}) sharp={} negative_h={} grid_points={}\n", a.example,
                     format_double(mu), format_double(report.min_violation), format_double(report.witness_x),
                     format_double(report.witness_y), report.sharp() ? "yes" : "no", report.negative_h_count,
                     report.grid_points);
  return kOk;
}

int cmd_image(std::string const &kind, ImageArgs const &a, std::ostream &out, std::ostream &err)
{
  if (!a.seed) {
    err << "image " << kind << " adds random noise: --seed is required\n";
    return kUsage;
  }
  ImageGrid const clean = read_pgm(a.input);
  std::optional<ExperimentSpec> spec;
  if (kind == "tv") {
    TvOptions o;
    o.model = tv_model_from_string(a.model.value_or("convex"));
    o.lambda = a.lambda;
    o.noise_sigma = a.noise;
    o.wc1_target = a.target;
    spec = tv_spec(clean, o, *a.seed);
  } else {
    spec = deblur_spec(clean, deblur_model_from_string(a.model.value_or("wc")), a.blur_std, a.eps, *a.seed);
  }
  if (a.iters) { spec->iters = *a.iters; }

  SolveOptions opts;
  opts.stop.max_iters = spec->iters;
  opts.enforce_regime = spec->enforce_regime;
  opts.seed = spec->seed;
  opts.keep_rows = false;
  std::optional<TraceWriter> writer;
  auto meta = trace_metadata(spec->name, spec->regime, spec->steps, spec->seed);
  if (a.trace) {
    write_metadata(metadata_path(*a.trace), meta);
    writer.emplace(*a.trace);
    opts.on_row = [&](TraceRow const &row, Vec const &, Vec const &) { writer->write(row); };
  }
  Rng rng(*a.seed);
  auto const trace = solve(spec->problem, spec->regime, spec->steps, make_start(*spec, rng), opts);
  if (writer) {
    meta["iterations"] = std::to_string(trace.iterations);
    meta["stop_reason"] = to_string(trace.stop_reason);
    writer->finish(meta, metadata_path(*a.trace));
  }

  ImageGrid const result = as_image(*spec, trace.x);
  write_pgm(a.output, result);
  if (a.noisy_out) { write_pgm(*a.noisy_out, spec->image->observed); }
  out << fmt::format("model={} psnr_noisy={:.4f} psnr_out={:.4f}\n", spec->name,
                     psnr(spec->image->clean, spec->image->observed), psnr(spec->image->clean, result));
  return kOk;
}

int cmd_phantom(PhantomArgs const &a, std::ostream &out)
{
  write_pgm(a.output, phantom(a.n), a.ascii ? PgmFormat::Ascii : PgmFormat::Binary);
  out << "wrote " << a.output << '\n';
  return kOk;
}

void add_image_options(CLI::App *cmd, ImageArgs &a)
{
  cmd->add_option("input", a.input, "input PGM (P2 or P5)")->required();
  cmd->add_option("output", a.output, "restored image (P5)")->required();
  cmd->add_option("--seed", a.seed, "noise seed (required)");
  cmd->add_option("--iters", a.iters, "iteration budget");
  cmd->add_option("--trace", a.trace, "trace CSV path");
  cmd->add_option("--noisy-out", a.noisy_out, "also save the observed image");
}

} // namespace

int run(std::vector<std::string> args, std::ostream &out, std::ostream &err)
{
  CLI::App app{"Primal-dual solver for weakly convex saddle problems"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_help_all_flag("--help-all");
  app.add_option("--config", "key=value file; command-line flags override it");

  SolveArgs sa;
  auto *solve_cmd = app.add_subcommand("solve", "run a named experiment and write its trace");
  solve_cmd->add_option("experiment", sa.experiment, join(experiment_names()))->required();
  solve_cmd->add_option("--seed", sa.seed, "seed for data and starts (required)");
  solve_cmd->add_option("--iters", sa.iters, "iteration budget");
  solve_cmd->add_option("--sigma", sa.sigma, "primal step");
  solve_cmd->add_option("--tau", sa.tau, "dual step");
  solve_cmd->add_option("--theta", sa.theta, "relaxation in [0,1]");
  solve_cmd->add_option("--regime", sa.regime, "dual-first or primal-first");
  solve_cmd->add_option("--start", sa.start, "inside|outside (example4), zeros|scaled (l1, l1wc)");
  solve_cmd->add_option("--n", sa.n, "unknowns (l1)");
  solve_cmd->add_option("--m", sa.m, "measurements (l1)");
  solve_cmd->add_option("--density", sa.density, "nonzero fraction of x* (l1)");
  solve_cmd->add_option("--noise", sa.noise, "constant or uniform (l1)");
  solve_cmd->add_option("--starts", sa.starts, "number of independent starts, run concurrently");
  solve_cmd->add_option("--out", sa.out, "trace CSV path; indexed when --starts > 1");
  solve_cmd->add_option("--residual-tol", sa.residual_tol, "stop when |z_n - z_{n-1}| <= tol");
  solve_cmd->add_option("--dist-tol", sa.dist_tol, "stop when dist to the solution set <= tol");

  SharpnessArgs ha;
  auto *sharp_cmd = app.add_subcommand("sharpness", "grid scan of H - mu*dist for a 1D example");
  sharp_cmd->add_option("example", ha.example, "example1..4 or example4-variant")->required();
  sharp_cmd->add_option("--mu", ha.mu, "sharpness constant");
  sharp_cmd->add_option("--box", ha.box, "lo,hi or xlo,xhi,ylo,yhi")->delimiter(',');
  sharp_cmd->add_option("--step", ha.step, "grid step");
  sharp_cmd->add_option("--out", ha.out, "contour CSV x,y,value");

  auto *image_cmd = app.add_subcommand("image", "denoise or deblur a PGM image");
  image_cmd->require_subcommand(1);
  ImageArgs tv_args, deblur_args;
  auto *tv_cmd = image_cmd->add_subcommand("tv", "total-variation denoising");
  add_image_options(tv_cmd, tv_args);
  tv_cmd->add_option("--model", tv_args.model, "convex, wc1, wc2, wc3, wc4");
  tv_cmd->add_option("--lambda", tv_args.lambda, "data weight (default 8; 1 for wc1)");
  tv_cmd->add_option("--noise", tv_args.noise, "Gaussian noise level");
  tv_cmd->add_option("--target", tv_args.target, "scalar target of wc1 (default |b|^2)");
  auto *deblur_cmd = image_cmd->add_subcommand("deblur", "Gaussian deblurring");
  add_image_options(deblur_cmd, deblur_args);
  deblur_cmd->add_option("--model", deblur_args.model, "convex or wc");
  deblur_cmd->add_option("--std", deblur_args.blur_std, "blur standard deviation");
  deblur_cmd->add_option("--eps", deblur_args.eps, "noise level");

  PhantomArgs pa;
  auto *phantom_cmd = app.add_subcommand("phantom", "write the piecewise-constant test image");
  phantom_cmd->add_option("output", pa.output, "PGM path")->required();
  phantom_cmd->add_option("--n", pa.n, "side length");
  phantom_cmd->add_flag("--ascii", pa.ascii, "write P2 instead of P5");

  try {
    args = expand_config(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (CLI::ParseError const &e) {
    int const code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  } catch (IoError const &e) {
    err << e.what() << '\n';
    return kIo;
  } catch (std::exception const &e) {
    err << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*solve_cmd) { return cmd_solve(sa, out, err); }
    if (*sharp_cmd) { return cmd_sharpness(ha, out, err); }
    if (*tv_cmd) { return cmd_image("tv", tv_args, out, err); }
    if (*deblur_cmd) { return cmd_image("deblur", deblur_args, out, err); }
    if (*phantom_cmd) { return cmd_phantom(pa, out); }
  } catch (StepsizeViolation const &e) {
    err << "stepsize violation: " << e.what() << '\n';
    return kStepsize;
  } catch (ImageFormatError const &e) {
    err << "malformed image: " << e.what() << '\n';
    return kIo;
  } catch (IoError const &e) {
    err << e.what() << '\n';
    return kIo;
  } catch (std::out_of_range const &e) {
    err << e.what() << '\n';
    return kUnknown;
  } catch (std::exception const &e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

} // namespace wcpd::cli
