#include "kscope/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "kscope/errors.hpp"
#include "kscope/io.hpp"

namespace kscope::cli {

namespace {

using io::Json;

struct RunConfig {
  std::string command;
  std::string fn;
  std::optional<int> param;
  std::optional<std::int64_t> mod;
  int k = 2;
  int L = 8;
  std::int64_t M = 256;
  std::optional<std::int64_t> N;
  std::vector<std::string> s;
  double re0 = 0.9, re1 = 1.1, im1 = 10.0, step = 0.05;
  int p = 2;
  int budget = 50;
  bool reverse = false;
  bool series = false;
  std::string out;
  std::string format = "json";
  int threads = 1;
  std::string rep_path;
  std::string method = "recursion";
  int levels = -1;
  int m_max = 200;
  long lattice_m = 5;
  int lattice_l = 3;
  std::vector<std::int64_t> n_list;
  std::vector<std::int64_t> X;
  std::int64_t v = 0;
  std::int64_t n_max = 10;
  std::vector<double> T;
};

double parse_real(const std::string& text) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(text, &used);
  } catch (const std::exception&) {
    throw DomainError("not a number: '" + text + "'");
  }
  if (used != text.size()) throw DomainError("not a number: '" + text + "'");
  return x;
}

FunctionId function_of(const RunConfig& c) {
  if (c.fn.empty()) throw DomainError(c.command + " needs --fn");
  FunctionId id = parse_function_id(c.fn, c.param);
  if (c.mod) id = id.reduced(*c.mod);
  return id;
}

ValueTable table_of(const RunConfig& c, std::int64_t N) {
  if (c.fn.empty()) throw DomainError(c.command + " needs --fn");
  ValueTable t = generate(parse_function_id(c.fn, c.param), N);
  return c.mod ? reduce_mod(t, *c.mod) : t;
}

LinearRepresentation representation_of(const RunConfig& c) {
  if (!c.rep_path.empty()) {
    std::ifstream in(c.rep_path);
    if (!in) throw DomainError("cannot read " + c.rep_path);
    Json j;
    try {
      j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw DomainError("cannot parse " + c.rep_path + ": " + e.what());
    }
    return io::representation_from_json(j);
  }
  const ValueTable t = table_of(c, c.N.value_or(required_table_size(c.k, c.L, c.M)));
  return build_representation(t, c.k, c.L, c.M);
}

std::vector<cplx> points_of(const RunConfig& c) {
  std::vector<cplx> out;
  for (const std::string& s : c.s) out.push_back(parse_complex(s));
  return out;
}

std::string csv_line(std::initializer_list<std::string> fields) {
  std::string out;
  for (const std::string& f : fields) {
    if (!out.empty()) out += ',';
    out += f;
  }
  return out + "\n";
}

Json complex_json(cplx z) { return Json::array({z.real(), z.imag()}); }

// Result of one command: JSON always, CSV when the command has a tabular form.
struct Output {
  Json json;
  std::optional<std::string> csv;
};

Output cmd_generate(const RunConfig& c) {
  if (!c.N) throw DomainError("generate needs --N");
  const ValueTable t = table_of(c, *c.N);
  return {io::table_json(t), io::table_csv(t)};
}

Output cmd_kernel_profile(const RunConfig& c) {
  const ValueTable t = table_of(c, c.N.value_or(required_table_size(c.k, c.L, c.M)));
  const KernelProfile p = kernel_profile(t, c.k, c.L, c.M);
  return {io::profile_json(p), io::profile_csv(p)};
}

Output cmd_rank_profile(const RunConfig& c) {
  const ValueTable t = table_of(c, c.N.value_or(required_table_size(c.k, c.L, c.M)));
  const RankProfile p = rank_profile(t, c.k, c.L, c.M);
  return {io::profile_json(p), io::profile_csv(p)};
}

Output cmd_density(const RunConfig& c) {
  if (c.X.empty()) throw DomainError("density needs --X");
  const ValueTable t = table_of(c, c.N.value_or(*std::max_element(c.X.begin(), c.X.end())));
  const auto rows = value_density(t, c.v, c.X);
  Json j = Json::array();
  std::string csv = "X,density,numerator,denominator,residual\n";
  for (const DensityEstimate& e : rows) {
    j.push_back({{"X", e.X},
                 {"density", e.density},
                 {"fraction", std::to_string(e.numerator) + "/" + std::to_string(e.denominator)},
                 {"residual", e.residual}});
    csv += csv_line({std::to_string(e.X), io::format_double(e.density), std::to_string(e.numerator),
                     std::to_string(e.denominator), io::format_double(e.residual)});
  }
  return {j, csv};
}

Output cmd_build_rep(const RunConfig& c) { return {io::representation_json(representation_of(c)), std::nullopt}; }

Output cmd_eval_rep(const RunConfig& c) {
  if (c.n_list.empty()) throw DomainError("eval-rep needs --n");
  const LinearRepresentation rep = representation_of(c);
  Json j = Json::array();
  std::string csv = "n,value\n";
  for (const std::int64_t n : c.n_list) {
    const std::int64_t v = eval(rep, n);
    j.push_back({{"n", n}, {"value", v}});
    csv += csv_line({std::to_string(n), std::to_string(v)});
  }
  return {j, csv};
}

Output cmd_pole_lattice(const RunConfig& c) {
  const LinearRepresentation rep = representation_of(c);
  const PoleLattice lattice = pole_lattice(rep, c.lattice_m, c.lattice_l);
  Json j = io::lattice_json(lattice);
  Json pts = Json::array();
  for (const PolePoint& p : lattice.points) {
    pts.push_back({{"s", complex_json(p.s)}, {"alpha_index", p.alpha_index}, {"m", p.m}, {"l", p.l}});
  }
  j["points"] = pts;
  return {j, io::lattice_csv(lattice.points)};
}

Output cmd_dirichlet_eval(const RunConfig& c) {
  const std::vector<cplx> pts = points_of(c);
  if (pts.empty()) throw DomainError("dirichlet-eval needs --s");
  std::vector<EvalResult> results;
  if (c.method == "recursion") {
    const LinearRepresentation rep = representation_of(c);
    RecursionOptions opts;
    opts.levels = c.levels;
    opts.m_max = c.m_max;
    for (const cplx& s : pts) results.push_back(continue_via_recursion(rep, s, opts));
  } else if (c.method == "direct") {
    const std::int64_t N = c.N.value_or(1000000);
    const ValueTable t = table_of(c, N);
    for (const cplx& s : pts) results.push_back(direct_sum(t, s, N));
  } else if (c.method == "zeta_quotient") {
    const IdentityId id(function_of(c));
    for (const cplx& s : pts) results.push_back(zeta_quotient_eval(id, s));
  } else {
    throw DomainError("unknown method '" + c.method + "' (recursion, direct, zeta_quotient)");
  }
  Json j = Json::array();
  std::string csv = "re,im,value_re,value_im,error_estimate,near_singular\n";
  for (const EvalResult& r : results) {
    j.push_back(io::eval_json(r));
    csv += csv_line({io::format_double(r.s.real()), io::format_double(r.s.imag()),
                     r.value ? io::format_double(r.value->real()) : "nan",
                     r.value ? io::format_double(r.value->imag()) : "nan", io::format_double(r.error_estimate),
                     r.flags.near_singular ? "1" : "0"});
  }
  return {j, csv};
}

Output cmd_verify_identity(const RunConfig& c) {
  const IdentityId id(function_of(c));
  std::vector<cplx> pts = points_of(c);
  if (pts.empty()) pts = id.sample_points();
  const std::int64_t N = c.N.value_or(1000000);
  const ValueTable t = table_of(c, N);
  const IdentityReport report = verify_identity(id, t, pts, N);
  std::string csv = "re,im,lhs_re,lhs_im,rhs_re,rhs_im,residual,bound,pass\n";
  for (const IdentitySample& s : report.samples) {
    csv += csv_line({io::format_double(s.s.real()), io::format_double(s.s.imag()), io::format_double(s.lhs.real()),
                     io::format_double(s.lhs.imag()), io::format_double(s.rhs.real()), io::format_double(s.rhs.imag()),
                     io::format_double(s.residual), io::format_double(s.bound), s.pass ? "PASS" : "FAIL"});
  }
  return {io::identity_json(report), csv};
}

Output cmd_pole_scan(const RunConfig& c) {
  const LinearRepresentation rep = representation_of(c);
  if (c.format == "csv") {
    return {Json(), io::scan_csv(scan_grid(rep, c.re0, c.re1, c.im1, c.step, c.threads))};
  }
  return {io::pole_scan_json(pole_scan(rep, c.re0, c.re1, c.im1, c.step)), std::nullopt};
}

Output cmd_singularities(const RunConfig& c) {
  Json j = Json::array();
  std::string csv = "n,point\n";
  for (const Singularity& s : landau_walfisz_singularities(c.n_max)) {
    j.push_back({{"n", s.n}, {"point", s.point}});
    csv += csv_line({std::to_string(s.n), io::format_double(s.point)});
  }
  return {j, csv};
}

Output cmd_zeta(const RunConfig& c) {
  const std::vector<cplx> pts = points_of(c);
  if (pts.empty()) throw DomainError("zeta needs --s");
  Json j = Json::array();
  std::string csv = "re,im,value_re,value_im,error_estimate\n";
  for (const cplx& s : pts) {
    const ZetaEval z = zeta_em(s);
    j.push_back({{"s", complex_json(z.s)},
                 {"value", complex_json(z.value)},
                 {"terms", z.terms_used},
                 {"bernoulli_order", z.bernoulli_order},
                 {"error_estimate", z.error_estimate}});
    csv += csv_line({io::format_double(s.real()), io::format_double(s.imag()), io::format_double(z.value.real()),
                     io::format_double(z.value.imag()), io::format_double(z.error_estimate)});
  }
  return {j, csv};
}

double single_T(const RunConfig& c) {
  if (c.T.size() != 1) throw DomainError(c.command + " needs exactly one --T");
  return c.T.front();
}

Output cmd_zeros(const RunConfig& c) {
  const auto zeros = critical_line_zeros(single_T(c));
  Json j = Json::array();
  for (const ZeroRecord& z : zeros) j.push_back(z.ordinate);
  return {j, io::zeros_csv(zeros)};
}

Output cmd_zero_count(const RunConfig& c) {
  const ZeroCount zc = zero_count(single_T(c));
  TlogTRow row;
  row.T = zc.T;
  row.N = zc.count;
  row.ratio_T = static_cast<double>(zc.count) / zc.T;
  row.ratio_TlogT = row.ratio_T / std::log(zc.T);
  return {io::zero_count_json(zc), io::count_csv({row})};
}

Output cmd_tlogt(const RunConfig& c) {
  const std::vector<double> Ts = c.T.empty() ? std::vector<double>{50, 100, 200, 400} : c.T;
  const auto rows = tlogt_ratio_table(Ts);
  Json j;
  Json arr = Json::array();
  for (const TlogTRow& r : rows) {
    arr.push_back({{"T", r.T}, {"N", r.N}, {"ratio_T", r.ratio_T}, {"ratio_TlogT", r.ratio_TlogT}});
  }
  j["rows"] = arr;
  j["ratio_T_strictly_increasing"] = ratio_T_strictly_increasing(rows);
  return {j, io::count_csv(rows)};
}

Output cmd_christol_orbit(const RunConfig& c) {
  if (!c.N) throw DomainError("christol-orbit needs --N");
  const ValueTable t = table_of(c, *c.N);
  const FpSeries series = series_from_table(t, c.p, *c.N);
  if (c.series) return {io::series_json(series), std::nullopt};
  return {io::orbit_json(orbit_explore(series, c.budget, c.reverse)), std::nullopt};
}

void add_function_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("--fn", c.fn, "arithmetic function, e.g. lambda, mu, q_m, tau_k");
  sub->add_option("--param", c.param, "parameter for tau_k, sigma_m, q_m");
  sub->add_option("--mod", c.mod, "reduce values modulo m");
}

void add_kernel_options(CLI::App* sub, RunConfig& c) {
  add_function_options(sub, c);
  sub->add_option("--k", c.k, "base")->check(CLI::Range(2, 64));
  sub->add_option("--L", c.L, "kernel depth")->check(CLI::Range(0, 40));
  sub->add_option("--M", c.M, "comparison window")->check(CLI::Range(std::int64_t{1}, std::int64_t{1} << 40));
  sub->add_option("--N", c.N, "table size (default: smallest that fits)");
}

void add_rep_options(CLI::App* sub, RunConfig& c) {
  add_kernel_options(sub, c);
  sub->add_option("--rep", c.rep_path, "representation JSON written by build-rep");
}

// Options given on the command line, in declaration order.
Json config_json(const CLI::App* sub, const std::string& command) {
  Json j;
  j["command"] = command;
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->count() == 0 || opt->get_name() == "--help") continue;
    const auto& res = opt->results();
    if (res.size() == 1) {
      j[opt->get_name()] = res.front();
    } else {
      j[opt->get_name()] = res;
    }
  }
  return j;
}

void emit(const RunConfig& c, const Json& config, const Output& result, double wall, std::ostream& out) {
  std::ostringstream text;
  if (c.format == "csv") {
    if (!result.csv) throw DomainError(c.command + " has no CSV form; use --format json");
    text << "# kernelscope " << KSCOPE_VERSION << "\n# config " << config.dump() << "\n" << *result.csv;
  } else {
    Json j;
    j["meta"] = {{"version", KSCOPE_VERSION}, {"config", config}, {"wall_time_s", wall}};
    j["result"] = result.json;
    text << j.dump(2) << "\n";
  }
  if (c.out.empty()) {
    out << text.str();
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw DomainError("cannot write " + c.out);
  f << text.str();
}

}  // namespace

std::complex<double> parse_complex(const std::string& raw) {
  std::string text;
  for (const char ch : raw) {
    if (ch != ' ') text += ch;
  }
  if (text.empty()) throw DomainError("empty complex number");
  if (const auto comma = text.find(','); comma != std::string::npos) {
    return {parse_real(text.substr(0, comma)), parse_real(text.substr(comma + 1))};
  }
  if (text.back() != 'i') return {parse_real(text), 0.0};
  text.pop_back();
  std::size_t split = std::string::npos;
  for (std::size_t i = text.size(); i-- > 1;) {
    if ((text[i] == '+' || text[i] == '-') && text[i - 1] != 'e' && text[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  const auto imag = [](std::string part) {
    if (part.empty() || part == "+") return 1.0;
    if (part == "-") return -1.0;
    return parse_real(part);
  };
  if (split == std::string::npos) return {0.0, imag(text)};
  return {parse_real(text.substr(0, split)), imag(text.substr(split))};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"k-kernels, Dirichlet series continuation, zeta zeros and Cartier orbits"};
  app.name("kernelscope");
  app.set_version_flag("--version", KSCOPE_VERSION);
  app.require_subcommand(1);
  app.add_option("--threads", c.threads, "worker cap for grid scans")->check(CLI::Range(1, 256));

  using Handler = Output (*)(const RunConfig&);
  std::vector<std::pair<CLI::App*, Handler>> commands;
  const auto add = [&](const std::string& name, const std::string& help, Handler h) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--out", c.out, "output file (default stdout)");
    sub->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--threads", c.threads, "worker cap for grid scans")->check(CLI::Range(1, 256));
    commands.emplace_back(sub, h);
    return sub;
  };

  add_function_options(add("generate", "tabulate f(1..N)", cmd_generate), c);
  commands.back().first->add_option("--N", c.N, "table size");
  add_kernel_options(add("kernel-profile", "distinct k-kernel elements per depth", cmd_kernel_profile), c);
  add_kernel_options(add("rank-profile", "rational rank of the k-kernel per depth", cmd_rank_profile), c);
  {
    CLI::App* sub = add("density", "density of a value over prefixes", cmd_density);
    add_function_options(sub, c);
    sub->add_option("--v", c.v, "value to count");
    sub->add_option("--X", c.X, "prefix lengths")->expected(1, -1);
    sub->add_option("--N", c.N, "table size");
  }
  add_rep_options(add("build-rep", "linear representation from a saturated kernel", cmd_build_rep), c);
  {
    CLI::App* sub = add("eval-rep", "evaluate a representation at n", cmd_eval_rep);
    add_rep_options(sub, c);
    sub->add_option("--n", c.n_list, "indices")->expected(1, -1);
  }
  {
    CLI::App* sub = add("pole-lattice", "predicted pole lattice from the average matrix", cmd_pole_lattice);
    add_rep_options(sub, c);
    sub->add_option("--m-max", c.lattice_m, "vertical range |m| <= m_max");
    sub->add_option("--l-max", c.lattice_l, "leftward shifts 0..l_max");
  }
  {
    CLI::App* sub = add("dirichlet-eval", "evaluate a Dirichlet series", cmd_dirichlet_eval);
    add_rep_options(sub, c);
    sub->add_option("--s", c.s, "points, e.g. 2 or 0.5+14.1i")->expected(1, -1);
    sub->add_option("--method", c.method, "recursion, direct or zeta_quotient");
    sub->add_option("--levels", c.levels, "recursion levels (default automatic)");
    sub->add_option("--m-max", c.m_max, "binomial series cap");
  }
  {
    CLI::App* sub = add("verify-identity", "direct sum against the zeta-quotient closed form", cmd_verify_identity);
    sub->add_option("--id,--fn", c.fn, "function with a closed form");
    sub->add_option("--param", c.param, "parameter for q_m");
    sub->add_option("--s", c.s, "sample points")->expected(1, -1);
    sub->add_option("--N", c.N, "terms in the direct sum (default 10^6)");
  }
  {
    CLI::App* sub = add("pole-scan", "locate vanishing determinants in a rectangle", cmd_pole_scan);
    add_rep_options(sub, c);
    sub->add_option("--re0", c.re0, "left edge a");
    sub->add_option("--re1", c.re1, "right edge b");
    sub->add_option("--im1,--T", c.im1, "height T");
    sub->add_option("--step", c.step, "grid step")->check(CLI::PositiveNumber);
  }
  add("singularities", "square-free reciprocals 1/n", cmd_singularities)->add_option("--n-max", c.n_max, "bound");
  add("zeta", "zeta by Euler-Maclaurin", cmd_zeta)->add_option("--s", c.s, "points")->expected(1, -1);
  add("zeros", "critical-line zero ordinates up to T", cmd_zeros)->add_option("--T", c.T, "height");
  add("zero-count", "N(T) by the argument principle", cmd_zero_count)->add_option("--T", c.T, "height");
  add("tlogt", "N(T)/T and N(T)/(T log T)", cmd_tlogt)->add_option("--T", c.T, "heights")->expected(1, -1);
  {
    CLI::App* sub = add("christol-orbit", "Cartier section orbit over F_p", cmd_christol_orbit);
    add_function_options(sub, c);
    sub->add_option("--p", c.p, "prime");
    sub->add_option("--N", c.N, "series length");
    sub->add_option("--budget", c.budget, "orbit size cap")->check(CLI::PositiveNumber);
    sub->add_flag("--reverse", c.reverse, "visit sections in reverse order");
    sub->add_flag("--series", c.series, "emit the series instead of the orbit");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion& e) {
    out << KSCOPE_VERSION << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 1;
  }

  for (const auto& [sub, handler] : commands) {
    if (!sub->parsed()) continue;
    c.command = sub->get_name();
    try {
      const auto start = std::chrono::steady_clock::now();
      const Output result = handler(c);
      const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      emit(c, config_json(sub, c.command), result, wall, out);
      err << "wall_time_s=" << wall << "\n";
      return 0;
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      return static_cast<int>(e.error_class());
    } catch (const std::bad_alloc&) {
      err << "error: out of memory\n";
      return 2;
    }
  }
  err << app.help();
  return 1;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace kscope::cli
