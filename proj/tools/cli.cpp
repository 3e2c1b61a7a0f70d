#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "arnagg/aggregate.hpp"
#include "arnagg/matrix_io.hpp"
#include "arnagg/models.hpp"

namespace arnagg::cli {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Common {
  std::string input;
  std::string p0 = "uniform";
  std::string method = "cgsir";
  double kappa = kDefaultReorthThreshold;
  std::string policy = "never";
  double policy_tolerance = 1e-6;
  std::string out;
  std::uint64_t seed = 0;
  std::size_t samples = 1;
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Per-sample seeds are a fixed function of (seed, sample index).
std::uint64_t sample_seed(std::uint64_t seed, std::size_t sample) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(sample)));
}

std::size_t parse_count(std::string_view text, const std::string& what) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw InvalidArgument("bad " + what + " '" + std::string(text) + "'");
  return value;
}

OrthMethod make_method(const Common& c) {
  return OrthMethod(parse_orth_variant(c.method), c.kappa);
}

NormalizationPolicy make_policy(const Common& c) {
  return NormalizationPolicy(parse_normalization_mode(c.policy), c.policy_tolerance);
}

StochasticMatrix load_chain(const Common& c) {
  if (c.input.empty()) throw InvalidArgument("--input is required");
  return load_stochastic(c.input);
}

// uniform | point:I | random | random:S | file:PATH | PATH
Distribution make_p0(const std::string& spec, Index n, std::uint64_t seed) {
  if (spec == "uniform") return uniform_distribution(n);
  if (spec == "random") return random_distribution(n, seed);
  if (spec.rfind("random:", 0) == 0)
    return random_distribution(n, parse_count(std::string_view(spec).substr(7), "seed"));
  if (spec.rfind("point:", 0) == 0)
    return point_distribution(
        n, static_cast<Index>(parse_count(std::string_view(spec).substr(6), "state index")));
  const std::string path = spec.rfind("file:", 0) == 0 ? spec.substr(5) : spec;
  Vector v = load_vector(path);
  if (v.size() != n) throw DimensionMismatch(n, v.size(), "initial distribution " + path);
  return Distribution::strict(std::move(v));
}

bool random_p0(const std::string& spec) { return spec == "random"; }

std::vector<Distribution> make_samples(const Common& c, Index n) {
  if (c.samples < 1) throw InvalidArgument("--samples must be at least 1");
  if (c.samples > 1 && !random_p0(c.p0))
    throw InvalidArgument("--samples > 1 needs --p0 random");
  std::vector<Distribution> out;
  out.reserve(c.samples);
  for (std::size_t i = 0; i < c.samples; ++i)
    out.push_back(make_p0(c.p0, n, c.samples == 1 ? c.seed : sample_seed(c.seed, i)));
  return out;
}

// Runs f(0..count-1) on up to thread_budget() workers. Results keep job
// order; the first failing job's exception is rethrown.
template <class R>
std::vector<R> parallel_map(std::size_t count, const std::function<R(std::size_t)>& f) {
  std::vector<std::optional<R>> results(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        results[i] = f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min<std::size_t>(thread_budget(), count);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<R> out;
  out.reserve(count);
  for (auto& r : results) out.push_back(std::move(*r));
  return out;
}

// Writes to --out when given, else to the command's output stream.
template <class F>
void emit(const std::string& path, std::ostream& fallback, F&& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream file(path);
  if (!file) throw InvalidArgument("cannot open " + path + " for writing");
  write(file);
}

fs::path with_suffix(const fs::path& path, const std::string& suffix) {
  fs::path out = path;
  out.replace_filename(path.stem().string() + suffix + path.extension().string());
  return out;
}

std::string csv_optional(const std::optional<double>& v) { return v ? format_real(*v) : ""; }

void add_common(CLI::App* cmd, Common& c, bool p0 = true) {
  cmd->add_option("--input", c.input, "Transition matrix (.mtx or dense .csv)");
  if (p0) {
    cmd->add_option("--p0", c.p0, "Initial distribution: uniform | point:I | random | random:S | PATH");
    cmd->add_option("--seed", c.seed, "Seed for random initial distributions");
  }
  cmd->add_option("--method", c.method, "cgs | mgs | cgs2 | mgs2 | cgsir | mgsir");
  cmd->add_option("--kappa", c.kappa, "Re-orthogonalization threshold of the *ir methods");
  cmd->add_option("--out", c.out, "Output file (default: standard output)");
}

// ---- gen -------------------------------------------------------------------

struct GenOptions {
  std::string model;
  double epsilon = 0.5;
  Index n = 10;
  double density = 1.0;
  Index blocks = 3;
  Index block_size = 10;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_gen(const GenOptions& g, std::ostream& out) {
  fs::path path = g.out.empty() ? fs::path(g.model + ".mtx") : fs::path(g.out);
  if (g.model == "counterexample") {
    const auto [P, p0] = counterexample(g.epsilon);
    save_matrix(P.storage(), path);
    const fs::path p0_path = fs::path(path).replace_extension(".p0.csv");
    save_vector(p0.values(), p0_path);
    out << path.string() << '\n' << p0_path.string() << '\n';
    return kExitOk;
  }
  if (g.model == "random") {
    save_matrix(random_chain(g.n, g.density, g.seed).storage(), path);
  } else if (g.model == "ncd") {
    save_matrix(random_ncd(g.blocks, g.block_size, g.epsilon, g.seed).storage(), path);
  } else {
    throw InvalidArgument("unknown model '" + g.model + "' (counterexample | random | ncd)");
  }
  out << path.string() << '\n';
  return kExitOk;
}

// ---- uniformize ------------------------------------------------------------

int cmd_uniformize(const std::string& input, std::optional<double> gamma, const std::string& path,
                   std::ostream& out) {
  if (input.empty()) throw InvalidArgument("--input is required");
  const StochasticMatrix P = uniformize(load_generator(input), gamma);
  if (path.empty())
    write_matrix_market(P.storage(), out);
  else
    save_matrix(P.storage(), path);
  return kExitOk;
}

// ---- aggregate -------------------------------------------------------------

struct AggregateOptions {
  std::string mode = "schur";
  std::optional<Index> size;
  double epsilon = 1e-10;
  Index step_size = 1;
  std::string save;
};

int cmd_aggregate(const Common& c, const AggregateOptions& a, std::ostream& out) {
  const StochasticMatrix P = load_chain(c);
  const Distribution p0 = make_p0(c.p0, P.n(), c.seed);
  const OrthMethod method = make_method(c);
  const Index size = a.size.value_or(P.n());

  Aggregation agg;
  bool deflated = false;
  if (a.mode == "naive" || a.mode == "schur") {
    const ArnoldiFactorization f = arnoldi_iterate(P, p0, size, method);
    deflated = f.deflated;
    agg = build_aggregation(f, p0);
    if (a.mode == "schur") agg = aggregated_stationary(std::move(agg));
  } else if (a.mode == "dynamic") {
    DynamicResult r = pipeline_dynamic(P, p0, size, a.epsilon, a.step_size, method);
    deflated = r.deflated;
    agg = std::move(r.aggregation);
  } else {
    throw InvalidArgument("unknown mode '" + a.mode + "' (naive | schur | dynamic)");
  }

  const DenseMatrix defect = exactness_defect(agg, P);
  std::optional<double> criterion, residual;
  if (agg.pi_stationary) {
    criterion = convergence_criterion(agg, defect);
    residual = stationary_residual(P, agg);
  }
  emit(c.out, out, [&](std::ostream& s) {
    s << "size,deflated,static_error,criterion,stationary_residual\n";
    s << agg.size() << ',' << (deflated ? 1 : 0) << ',' << format_real(inf_norm(defect)) << ','
      << csv_optional(criterion) << ',' << csv_optional(residual) << '\n';
  });

  if (!a.save.empty()) {
    save_matrix(MatrixStorage(RowMajorMatrix(agg.Pi)), a.save + "_Pi.csv");
    save_matrix(MatrixStorage(RowMajorMatrix(agg.A)), a.save + "_A.csv");
    save_vector(agg.pi0, a.save + "_pi0.csv");
    if (agg.pi_stationary) save_vector(*agg.pi_stationary, a.save + "_pi.csv");
  }
  return kExitOk;
}

// ---- trace -----------------------------------------------------------------

int cmd_trace(const Common& c, std::optional<Index> size_opt, const std::string& ks_text,
              std::ostream& out) {
  const StochasticMatrix P = load_chain(c);
  const OrthMethod method = make_method(c);
  const NormalizationPolicy policy = make_policy(c);
  const std::vector<std::size_t> ks = parse_index_list(ks_text);
  const Index size = size_opt.value_or(std::min<Index>(P.n(), 10));
  if (size < 1 || size > P.n())
    throw InvalidArgument("--size must lie in [1, " + std::to_string(P.n()) + "]");
  const std::vector<Distribution> p0s = make_samples(c, P.n());
  if (p0s.size() > 1 && c.out.empty()) throw InvalidArgument("--samples > 1 needs --out");

  const auto traces = parallel_map<ErrorTrace>(p0s.size(), [&](std::size_t i) {
    const Aggregation agg = pipeline_naive(P, p0s[i], size, method);
    return error_trace(P, p0s[i], agg, ks, policy, TraceOptions{true, false});
  });

  if (traces.size() == 1) {
    emit(c.out, out, [&](std::ostream& s) { write_trace_csv(traces.front(), s); });
    return kExitOk;
  }
  ErrorTrace mean = traces.front();
  for (std::size_t r = 0; r < mean.steps.size(); ++r) {
    double e = 0.0, bs = 0.0, bg = 0.0;
    for (const auto& t : traces) {
      e += t.e_k[r];
      bs += t.bound_specific[r];
      bg += t.bound_general[r];
    }
    const auto count = static_cast<double>(traces.size());
    mean.e_k[r] = e / count;
    mean.bound_specific[r] = bs / count;
    mean.bound_general[r] = bg / count;
  }
  const fs::path base(c.out);
  for (std::size_t i = 0; i < traces.size(); ++i)
    emit(with_suffix(base, "_sample" + std::to_string(i)).string(), out,
         [&](std::ostream& s) { write_trace_csv(traces[i], s); });
  emit(with_suffix(base, "_mean").string(), out,
       [&](std::ostream& s) { write_trace_csv(mean, s); });
  return kExitOk;
}

// ---- sweep -----------------------------------------------------------------

struct SweepRow {
  double static_error = 0.0;
  double criterion = 0.0;
  std::vector<double> e_k;
  double seconds = 0.0;
};

int cmd_sweep(const Common& c, const std::string& sizes_text, const std::string& ks_text,
              std::ostream& out) {
  const StochasticMatrix P = load_chain(c);
  const OrthMethod method = make_method(c);
  const NormalizationPolicy policy = make_policy(c);
  const std::vector<std::size_t> sizes = parse_index_list(sizes_text);
  const std::vector<std::size_t> ks = ks_text.empty() ? std::vector<std::size_t>{}
                                                      : parse_index_list(ks_text);
  for (const std::size_t j : sizes)
    if (j < 1 || j > static_cast<std::size_t>(P.n()))
      throw InvalidArgument("size " + std::to_string(j) + " outside [1, " +
                            std::to_string(P.n()) + "]");
  const std::vector<Distribution> p0s = make_samples(c, P.n());

  const std::size_t jobs = sizes.size() * p0s.size();
  const auto rows = parallel_map<SweepRow>(jobs, [&](std::size_t job) {
    const Index j = static_cast<Index>(sizes[job / p0s.size()]);
    const Distribution& p0 = p0s[job % p0s.size()];
    const auto start = Clock::now();
    const Aggregation agg = pipeline_schur(P, p0, j, method);
    const DenseMatrix defect = exactness_defect(agg, P);
    SweepRow row;
    row.static_error = inf_norm(defect);
    row.criterion = convergence_criterion(agg, defect);
    if (!ks.empty()) row.e_k = error_trace(P, p0, agg, defect, ks, policy, {false, false}).e_k;
    row.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return row;
  });

  emit(c.out, out, [&](std::ostream& s) {
    s << "j,static_error,criterion";
    for (const std::size_t k : ks) s << ",e_k@" << k;
    s << ",wall_time_s\n";
    const auto count = static_cast<double>(p0s.size());
    for (std::size_t si = 0; si < sizes.size(); ++si) {
      SweepRow mean;
      mean.e_k.assign(ks.size(), 0.0);
      for (std::size_t p = 0; p < p0s.size(); ++p) {
        const SweepRow& r = rows[si * p0s.size() + p];
        mean.static_error += r.static_error / count;
        mean.criterion += r.criterion / count;
        for (std::size_t q = 0; q < ks.size(); ++q) mean.e_k[q] += r.e_k[q] / count;
        mean.seconds += r.seconds / count;
      }
      s << sizes[si] << ',' << format_real(mean.static_error) << ',' << format_real(mean.criterion);
      for (const double e : mean.e_k) s << ',' << format_real(e);
      s << ',' << format_real(mean.seconds) << '\n';
    }
  });
  return kExitOk;
}

// ---- bench -----------------------------------------------------------------

struct BenchOptions {
  std::string sizes = "16..64..16";
  Index n = 2000;
  double density = 0.005;
  std::uint64_t chain_seed = 1;
  std::size_t repetitions = 5;
  std::size_t warmup = 1;
  std::size_t trace_steps = 100;
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

int cmd_bench(const Common& c, const BenchOptions& b, std::ostream& out) {
  if (b.warmup < 1) throw InvalidArgument("--warmup must be at least 1");
  if (b.repetitions < 1) throw InvalidArgument("--repetitions must be at least 1");
  const StochasticMatrix P =
      c.input.empty() ? random_chain(b.n, b.density, b.chain_seed) : load_chain(c);
  const Distribution p0 = make_p0(c.p0, P.n(), c.seed);
  const OrthMethod method = make_method(c);
  const std::vector<std::size_t> sizes = parse_index_list(b.sizes);
  std::vector<std::size_t> ks(1, b.trace_steps);

  using Job = std::function<void(Index)>;
  const std::vector<std::pair<std::string, Job>> configs = {
      {"arnoldi", [&](Index j) { (void)arnoldi_iterate(P, p0, j, method); }},
      {"arnoldi+schur",
       [&](Index j) {
         const Aggregation agg = pipeline_schur(P, p0, j, method);
         (void)convergence_criterion(P, agg);
       }},
      {"arnoldi+schur+trace",
       [&](Index j) {
         const Aggregation agg = pipeline_schur(P, p0, j, method);
         (void)error_trace(P, p0, agg, ks);
       }},
  };

  emit(c.out, out, [&](std::ostream& s) {
    s << "config,n,j,repetitions,median_seconds\n";
    for (const auto& [name, job] : configs) {
      for (const std::size_t js : sizes) {
        const auto j = static_cast<Index>(js);
        if (j < 1 || j > P.n())
          throw InvalidArgument("size " + std::to_string(j) + " outside [1, " +
                                std::to_string(P.n()) + "]");
        for (std::size_t w = 0; w < b.warmup; ++w) job(j);
        std::vector<double> times;
        for (std::size_t r = 0; r < b.repetitions; ++r) {
          const auto start = Clock::now();
          job(j);
          times.push_back(std::chrono::duration<double>(Clock::now() - start).count());
        }
        s << name << ',' << P.n() << ',' << j << ',' << b.repetitions << ','
          << format_real(median(times)) << '\n';
      }
    }
  });
  return kExitOk;
}

}  // namespace

std::vector<std::size_t> parse_index_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream items(text);
  std::string item;
  while (std::getline(items, item, ',')) {
    if (item.empty()) continue;
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_count(item, "index"));
      continue;
    }
    const std::string rest = item.substr(dots + 2);
    const auto dots2 = rest.find("..");
    const std::size_t first = parse_count(std::string_view(item).substr(0, dots), "range start");
    const std::size_t last =
        parse_count(dots2 == std::string::npos ? rest : rest.substr(0, dots2), "range end");
    const std::size_t step =
        dots2 == std::string::npos ? 1 : parse_count(rest.substr(dots2 + 2), "range step");
    if (step == 0) throw InvalidArgument("range step must be positive in '" + item + "'");
    if (last < first) throw InvalidArgument("descending range '" + item + "'");
    for (std::size_t v = first; v <= last; v += step) out.push_back(v);
  }
  if (out.empty()) throw InvalidArgument("empty index list '" + text + "'");
  if (!std::is_sorted(out.begin(), out.end()))
    throw InvalidArgument("index list '" + text + "' is not ascending");
  return out;
}

unsigned thread_budget() {
  unsigned budget = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ARNAGG_THREADS")) {
    unsigned value = 0;
    const std::string_view text(env);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc() && ptr == text.data() + text.size() && value > 0) budget = value;
  }
  return budget;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Arnoldi aggregation of Markov chains"};
  app.require_subcommand(1);

  Common common;
  GenOptions gen_options;
  auto* gen = app.add_subcommand("gen", "Write a synthetic chain");
  gen->add_option("model", gen_options.model, "counterexample | random | ncd")->required();
  gen->add_option("--epsilon", gen_options.epsilon, "Coupling strength");
  gen->add_option("--n", gen_options.n, "State count (random)");
  gen->add_option("--density", gen_options.density, "Fraction of nonzeros per row (random)");
  gen->add_option("--blocks", gen_options.blocks, "Block count (ncd)");
  gen->add_option("--block-size", gen_options.block_size, "States per block (ncd)");
  gen->add_option("--seed", gen_options.seed, "Generator seed");
  gen->add_option("--out", gen_options.out, "Matrix path; .mtx or .csv");

  std::string uni_input, uni_out;
  std::optional<double> gamma;
  auto* uni = app.add_subcommand("uniformize", "Turn a generator matrix into I + Q / gamma");
  uni->add_option("--input", uni_input, "Generator matrix")->required();
  uni->add_option("--gamma", gamma, "Uniformization rate");
  uni->add_option("--out", uni_out, "Output path (default: Matrix Market on stdout)");

  AggregateOptions agg_options;
  std::optional<Index> size;
  auto* agg = app.add_subcommand("aggregate", "Build one aggregation and report its quality");
  add_common(agg, common);
  agg->add_option("--mode", agg_options.mode, "naive | schur | dynamic");
  agg->add_option("--size", size, "Aggregation size (maximum size for dynamic)");
  agg->add_option("--epsilon", agg_options.epsilon, "Criterion threshold (dynamic)");
  agg->add_option("--step-size", agg_options.step_size, "Expansions between checks (dynamic)");
  agg->add_option("--save", agg_options.save, "Prefix for Pi, A, pi0 and pi CSV files");

  std::string ks_text = "0..100";
  auto* trace = app.add_subcommand("trace", "Error and both bounds per step");
  add_common(trace, common);
  trace->add_option("--size", size, "Aggregation size");
  trace->add_option("--ks", ks_text, "Steps to record, e.g. 0..100 or 0,10,100");
  trace->add_option("--policy", common.policy, "never | cond | always");
  trace->add_option("--policy-tolerance", common.policy_tolerance, "Tolerance of cond");
  trace->add_option("--samples", common.samples, "Number of random initial distributions");

  std::string sizes_text, sweep_ks;
  auto* sweep = app.add_subcommand("sweep", "Static error, criterion and errors per size");
  add_common(sweep, common);
  sweep->add_option("--sizes", sizes_text, "Sizes, e.g. 1..30 or 10..100..10")->required();
  sweep->add_option("--ks", sweep_ks, "Steps at which e_k is reported");
  sweep->add_option("--policy", common.policy, "never | cond | always");
  sweep->add_option("--policy-tolerance", common.policy_tolerance, "Tolerance of cond");
  sweep->add_option("--samples", common.samples, "Number of random initial distributions");

  BenchOptions bench_options;
  auto* bench = app.add_subcommand("bench", "Median runtimes of the pipeline stages");
  add_common(bench, common);
  bench->add_option("--sizes", bench_options.sizes, "Aggregation sizes");
  bench->add_option("--n", bench_options.n, "States of the generated chain without --input");
  bench->add_option("--density", bench_options.density, "Density of the generated chain");
  bench->add_option("--chain-seed", bench_options.chain_seed, "Seed of the generated chain");
  bench->add_option("--repetitions", bench_options.repetitions, "Timed runs per point");
  bench->add_option("--warmup", bench_options.warmup, "Untimed runs per point");
  bench->add_option("--trace-steps", bench_options.trace_steps, "Steps of the traced config");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_options, out);
    if (uni->parsed()) return cmd_uniformize(uni_input, gamma, uni_out, out);
    if (agg->parsed()) {
      agg_options.size = size;
      return cmd_aggregate(common, agg_options, out);
    }
    if (trace->parsed()) return cmd_trace(common, size, ks_text, out);
    if (sweep->parsed()) return cmd_sweep(common, sizes_text, sweep_ks, out);
    if (bench->parsed()) return cmd_bench(common, bench_options, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace arnagg::cli
