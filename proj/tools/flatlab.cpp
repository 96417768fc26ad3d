// Command-line driver: analyze, witness, commutant-check, compact-decay.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "flatlab/errors.hpp"
#include "flatlab/multipliers.hpp"
#include "flatlab/report.hpp"

namespace fs = std::filesystem;
using namespace flatlab;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitVerdict = 2;
constexpr int kExitPrecondition = 3;
constexpr int kExitInternal = 1;

struct Options {
  std::string space = "interval";
  std::size_t n = 1024;
  std::string grid;
  std::string p = "2";
  std::string multiplier = "identity";
  std::string op = "identity";
  std::string dominator;
  std::string x = "one";
  unsigned steps = 0;
  double theta = 0.01;
  double tau = 0.0;
  std::size_t bands = 4;
  std::uint64_t seed = 1;
  std::size_t trials = 32;
  std::string scenario = "counterexample";
  std::string kernel = "gaussian";
  double width = 0.02;
  std::size_t terms = 64;
  double level = 0.5;
  bool vectors = false;
  std::string out;
};

MeasureSpace parse_grid(const std::string& text) {
  std::size_t nx = 0, ny = 0;
  const auto sep = text.find('x');
  try {
    if (sep == std::string::npos) {
      nx = ny = std::stoul(text);
    } else {
      nx = std::stoul(text.substr(0, sep));
      ny = std::stoul(text.substr(sep + 1));
    }
  } catch (const std::exception&) {
    throw ParseError("--grid expects N or NXxNY, got '" + text + "'");
  }
  return MeasureSpace::product_grid(nx, ny);
}

MeasureSpace build_space(const Options& o, const std::string& default_grid = "32") {
  if (!o.grid.empty()) return parse_grid(o.grid);
  if (o.space == "interval") return MeasureSpace::uniform_interval(o.n);
  if (o.space == "grid") return parse_grid(default_grid);
  if (!o.space.empty() && o.space.front() == '{') {
    Json j;
    try {
      j = Json::parse(o.space);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("--space: ") + e.what());
    }
    return space_from_json(j);
  }
  throw ParseError("--space expects interval, grid or a JSON descriptor");
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return in;
}

LinearOperator build_operator(const MeasureSpace& space, const std::string& spec, Exponent p) {
  if (spec == "identity") return LinearOperator::identity(space, p);
  if (spec == "averaging") return averaging_counterexample(space, p);
  if (spec == "reversal") {
    const auto n = static_cast<Eigen::Index>(space.size());
    Matrix m = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) m(i, n - 1 - i) = 1.0;
    return {space, std::move(m), p};
  }
  if (spec.rfind("multiplier:", 0) == 0)
    return multiplication(make_multiplier(space, spec.substr(11)), p);
  if (spec.rfind("csv:", 0) == 0) {
    auto in = open_input(spec.substr(4));
    return read_operator_csv(in, space).with_exponent(p);
  }
  throw ParseError("unknown operator '" + spec + "'");
}

const Flat& largest_flat(const FlatReport& report) {
  if (!report.has_flat()) throw PreconditionError("the multiplier has no flat at this theta/tau");
  return *std::max_element(report.flats.begin(), report.flats.end(),
                           [](const Flat& a, const Flat& b) { return a.measure < b.measure; });
}

LpFunction build_x(const MeasureSpace& space, const Options& o, const LpFunction& phi, Exponent p) {
  if (o.x == "one") return LpFunction::constant(space, 1.0, p);
  if (o.x == "flat")
    return LpFunction::indicator(largest_flat(detect_flats(phi, o.theta, o.tau)).set, p);
  if (o.x.rfind("csv:", 0) == 0) {
    auto in = open_input(o.x.substr(4));
    return read_csv(in, space).with_exponent(p);
  }
  throw ParseError("unknown --x '" + o.x + "' (one, flat, csv:<path>)");
}

Json check_json(const std::string& name, bool pass, double value, double bound) {
  return {{"name", name}, {"pass", pass}, {"value", value}, {"bound", bound}};
}

bool all_checks_pass(const Json& checks) {
  return std::all_of(checks.begin(), checks.end(),
                     [](const Json& c) { return c.at("pass").get<bool>(); });
}

Json header(const std::string& command, const MeasureSpace& space, const Options& o) {
  return {{"schema", kSchemaVersion},
          {"command", command},
          {"space", space_to_json(space)},
          {"p", o.p},
          {"seed", o.seed}};
}

void write_file(const Options& o, const std::string& name, const std::string& content) {
  if (o.out.empty()) return;
  fs::create_directories(o.out);
  std::ofstream f(fs::path(o.out) / name, std::ios::binary);
  if (!f) throw PreconditionError("cannot write to " + (fs::path(o.out) / name).string());
  f << content;
}

void emit(const Options& o, const Json& report) {
  const std::string text = report.dump(2) + "\n";
  std::cout << text;
  write_file(o, "report.json", text);
}

int run_analyze(const Options& o) {
  const auto space = build_space(o);
  const Exponent p = Exponent::parse(o.p);
  const auto phi = make_multiplier(space, o.multiplier);
  Json j = header("analyze", space, o);
  j["multiplier"] = o.multiplier;

  const auto flats = detect_flats(phi, o.theta, o.tau);
  j["flats"] = to_json(flats);

  try {
    Json bands = Json::array();
    for (const auto& b : enumerate_hyperinvariant_bands(phi, o.bands)) bands.push_back(to_json(b));
    j["bands"] = bands;
  } catch (const SingleBandOnly& e) {
    j["bands"] = {{"error", std::string(e.kind())}, {"message", e.what()}};
  }

  Json checks = Json::array();
  if (flats.has_flat()) {
    const Flat& f = largest_flat(flats);
    const auto proj = rank_one_flat(phi, f.set, p, o.tau);
    const double comm = commutator_norm(proj, multiplication(phi, p));
    const Matrix sq = (proj * proj - proj).matrix();
    const double idem = sq.cwiseAbs().maxCoeff();
    const double scale = proj.matrix().cwiseAbs().maxCoeff();
    j["rank_one_flat"] = {{"flat_value", f.value},
                          {"flat_measure", f.measure},
                          {"commutator_norm", comm},
                          {"operator_norm", to_json(operator_norm(proj))}};
    checks.push_back(check_json("flat_commutes", comm <= 1e-12, comm, 1e-12));
    checks.push_back(check_json("positive", proj.is_positive(), proj.is_positive() ? 1.0 : 0.0, 1.0));
    checks.push_back(check_json("idempotent", idem <= 1e-12 * scale, idem, 1e-12 * scale));
  }
  j["checks"] = checks;
  j["all_pass"] = all_checks_pass(checks);
  emit(o, j);
  return all_checks_pass(checks) ? kExitPass : kExitVerdict;
}

int run_witness_cmd(const Options& o) {
  const auto space = build_space(o);
  const Exponent p = Exponent::parse(o.p);
  const auto phi = make_multiplier(space, o.multiplier);
  const auto a = build_operator(space, o.op, p);
  const auto x = build_x(space, o, phi, p);

  WitnessConfig cfg;
  cfg.steps = o.steps;
  const auto trace = run_witness(a, phi, x, cfg);
  auto verdicts = verify_trace(trace);
  if (!o.dominator.empty()) {
    const auto r = build_operator(space, o.dominator, p);
    const bool dom = dominates(r, a);
    const double comm = commutator_norm(r, multiplication(phi, p));
    verdicts.verdicts.push_back({"dominated", 0, dom, dom ? 1.0 : 0.0, 1.0});
    verdicts.verdicts.push_back({"dominator_commutes", 0, comm <= 1e-12, comm, 1e-12});
  }

  Json j = header("witness", space, o);
  j["multiplier"] = o.multiplier;
  j["operator"] = o.op;
  if (!o.dominator.empty()) j["dominator"] = o.dominator;
  j["x"] = o.x;
  j["trace"] = to_json(trace, o.vectors);
  j["verdicts"] = to_json(verdicts);
  j["all_pass"] = verdicts.all_pass();
  emit(o, j);
  std::ostringstream csv;
  write_trace_csv(csv, trace);
  write_file(o, "trace.csv", csv.str());
  return verdicts.all_pass() ? kExitPass : kExitVerdict;
}

int run_commutant_check(const Options& o) {
  const auto space = o.grid.empty() && o.space == "interval" ? parse_grid("32") : build_space(o);
  const Exponent p = Exponent::parse(o.p);
  LinearOperator r = LinearOperator::identity(space, p);
  if (o.scenario == "counterexample") {
    r = averaging_counterexample(space, p);
  } else if (o.scenario == "operator") {
    r = build_operator(space, o.op, p);
  } else {
    throw ParseError("unknown scenario '" + o.scenario + "' (counterexample, operator)");
  }

  Json checks = Json::array();
  for (const auto& c : counterexample_checks(r, 20, o.trials, o.seed))
    checks.push_back(check_json(c.name, c.pass, c.value, c.bound));

  // Supporting measurements for phi = y and its doubled version.
  const auto phi = make_multiplier(space, "y");
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector xv(static_cast<Eigen::Index>(space.size()));
  for (auto& v : xv) v = u(rng);
  const auto star = star_identity_check(r, phi, LpFunction(space, xv, p), 8);
  const auto phi2 = phi * 2.0;
  const auto low = level_set(phi2, LevelKind::AtMost, 1.0).set;
  const auto probe = growth_contradiction_probe(r, phi2, LpFunction::indicator(low, p), 1.5, 12);

  Json j = header("commutant-check", space, o);
  j["scenario"] = o.scenario;
  j["checks"] = checks;
  j["star_identity"] = {{"max_deviation", star.max_deviation},
                        {"powers_checked", star.powers_checked},
                        {"deviations", star.deviations}};
  j["growth_probe"] = {{"gamma", 1.5},
                       {"leak_mass", probe.leak_mass},
                       {"bound", probe.bound},
                       {"image_of_powers", probe.image_of_powers},
                       {"powers_of_image", probe.powers_of_image}};
  j["all_pass"] = all_checks_pass(checks);
  emit(o, j);
  return all_checks_pass(checks) ? kExitPass : kExitVerdict;
}

int run_compact_decay(const Options& o) {
  const auto space = build_space(o);
  const Exponent p = Exponent::parse(o.p);

  Kernel kern;
  if (o.kernel == "gaussian") kern = gaussian_kernel(o.width);
  else if (o.kernel == "constant") kern = constant_kernel(1.0);
  else throw ParseError("unknown kernel '" + o.kernel + "' (gaussian, constant)");

  std::vector<LpFunction> e;
  std::optional<LinearOperator> a, k;
  if (o.op == "identity" || o.op == "compression") {
    k = kernel_operator(space, kern, p);
    e = dyadic_disjoint_indicators(space, 0, space.size(), o.terms, p);
    std::vector<MeasurableSet> blocks;
    for (const auto& f : e) blocks.push_back(support(f));
    a = block_compression(*k, blocks);
  } else if (o.op == "kernel") {
    k = kernel_operator(space, kern, p);
    e = dyadic_disjoint_indicators(space, 0, space.size(), o.terms, p);
    a = *k;
  } else if (o.op.rfind("multiplier:", 0) == 0) {
    const auto psi = make_multiplier(space, o.op.substr(11));
    const auto idx = level_set(psi, LevelKind::AtLeast, o.level).set.indices();
    if (idx.empty() || idx.back() - idx.front() + 1 != idx.size())
      throw PreconditionError("{psi >= level} must be a non-empty run of consecutive atoms");
    e = dyadic_disjoint_indicators(space, idx.front(), idx.size(), o.terms, p);
    a = multiplication(psi, p);
    k = a;
  } else {
    throw ParseError("compact-decay operator must be compression, kernel or multiplier:<spec>");
  }

  const auto report = disjoint_decay(*a, *k, e);
  std::vector<double> kn;
  for (const auto& f : e) kn.push_back(k->apply(f.abs()).norm());
  const auto kernel_profile = decay_profile(kn, report.factor);

  Json order;
  try {
    const auto cert = order_bound_witness(*k, e, e.size());
    order = {{"holds", cert.holds},
             {"selected", cert.selected},
             {"distances", cert.distances},
             {"max_excess", cert.max_excess}};
  } catch (const NoClusterPoint& err) {
    order = {{"error", std::string(err.kind())}, {"message", err.what()}};
  }

  const bool positive =
      std::all_of(report.norms.begin(), report.norms.end(), [](double v) { return v > 0.0; });
  Json checks = Json::array();
  checks.push_back(check_json("images_nonzero", positive,
                              *std::min_element(report.norms.begin(), report.norms.end()), 0.0));
  checks.push_back(check_json("decays", report.decays, report.tail_max,
                              report.factor * report.head_max));
  checks.push_back(check_json("domination_consistent", report.domination_consistent,
                              report.domination_consistent ? 1.0 : 0.0, 1.0));

  Json j = header("compact-decay", space, o);
  j["kernel"] = o.kernel;
  j["width"] = o.width;
  j["operator"] = o.op;
  j["terms"] = o.terms;
  j["decay"] = to_json(report);
  j["kernel_images"] = to_json(kernel_profile);
  j["order_bound"] = order;
  j["checks"] = checks;
  j["all_pass"] = all_checks_pass(checks);
  emit(o, j);
  std::ostringstream csv;
  write_decay_csv(csv, report);
  write_file(o, "decay.csv", csv.str());
  return all_checks_pass(checks) ? kExitPass : kExitVerdict;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--space", o.space, "interval, grid, or a JSON space descriptor");
  cmd->add_option("--n", o.n, "atoms of the interval space")->check(CLI::PositiveNumber);
  cmd->add_option("--grid", o.grid, "product grid N or NXxNY");
  cmd->add_option("--p", o.p, "exponent p >= 1 or inf");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--out", o.out, "directory for report.json and CSV files");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flat detection, witness sequences and domination checks for multiplication operators"};
  app.require_subcommand(1);
  Options o;

  auto* analyze = app.add_subcommand("analyze", "flats, level bands and the rank-one flat projection");
  add_common(analyze, o);
  analyze->add_option("--multiplier", o.multiplier, "multiplier spec");
  analyze->add_option("--theta", o.theta, "minimum flat measure");
  analyze->add_option("--tau", o.tau, "value tolerance inside a flat");
  analyze->add_option("--bands", o.bands, "number of hyperinvariant bands");

  auto* witness = app.add_subcommand("witness", "run and verify the disjoint witness construction");
  add_common(witness, o);
  witness->add_option("--multiplier", o.multiplier, "multiplier spec");
  witness->add_option("--operator", o.op, "identity, averaging, reversal, multiplier:<spec>, csv:<path>");
  witness->add_option("--dominator", o.dominator, "operator R checked to dominate A and commute with M_phi");
  witness->add_option("--x", o.x, "starting vector: one, flat, csv:<path>");
  witness->add_option("--steps", o.steps, "splitting steps K (0 = default)");
  witness->add_option("--theta", o.theta, "minimum flat measure for --x flat");
  witness->add_option("--tau", o.tau, "value tolerance for --x flat");
  witness->add_flag("--vectors", o.vectors, "include e_n and A e_n in the report");

  auto* commutant = app.add_subcommand("commutant-check", "commutant verdicts against phi(x,y) = y");
  add_common(commutant, o);
  commutant->add_option("--scenario", o.scenario, "counterexample or operator");
  commutant->add_option("--operator", o.op, "operator for --scenario operator");
  commutant->add_option("--trials", o.trials, "random disjoint pairs");

  auto* decay = app.add_subcommand("compact-decay", "norm decay of disjoint images under a kernel");
  add_common(decay, o);
  decay->add_option("--kernel", o.kernel, "gaussian or constant");
  decay->add_option("--width", o.width, "gaussian width");
  decay->add_option("--terms", o.terms, "number of disjoint indicators");
  decay->add_option("--operator", o.op, "compression, kernel or multiplier:<spec>");
  decay->add_option("--level", o.level, "e_n live on {psi >= level} for multiplier operators");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitPrecondition;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  try {
    if (name == "analyze") return run_analyze(o);
    if (name == "witness") return run_witness_cmd(o);
    if (name == "commutant-check") return run_commutant_check(o);
    return run_compact_decay(o);
  } catch (const Error& e) {
    Json j{{"schema", kSchemaVersion},
           {"command", name},
           {"error", {{"kind", std::string(e.kind())}, {"message", e.what()}}}};
    std::cout << j.dump(2) << "\n";
    std::cerr << "flatlab: " << e.what() << "\n";
    return e.error_class() == ErrorClass::Verdict ? kExitVerdict : kExitPrecondition;
  } catch (const std::exception& e) {
    std::cerr << "flatlab: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
