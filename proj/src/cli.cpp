#include "udbound/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "udbound/io.hpp"
#include "udbound/verify.hpp"

namespace udbound::cli {

namespace {

namespace fs = std::filesystem;
using io::Json;

struct RunConfig {
  std::string format;
  std::string out;
  double tol = 0.0;
  std::uint64_t seed = 0;
  int d = 0;
  int d_min = 3;
  int d_max = 4;
  std::string kind;
  std::string ensemble;
  std::string cones;
  std::string measurement;
  std::string certificate;
};

// input or usage problems that map to exit code 2
struct UsageError : Error {
  using Error::Error;
};

int dimension_cap() {
  if (const char* env = std::getenv("UDBOUND_DIM_CAP")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v <= 0) throw UsageError("UDBOUND_DIM_CAP must be a positive integer");
    return static_cast<int>(v);
  }
  return example2::kDefaultDimensionCap;
}

std::string fmt6(double x) {
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

std::string dims_label(const DimVector& dims) {
  std::string s;
  for (std::size_t k = 0; k < dims.sites(); ++k) s += (k ? "x" : "") + std::to_string(dims[k]);
  return s;
}

std::string format_or(const RunConfig& c, const char* fallback) { return c.format.empty() ? fallback : c.format; }

void emit(const std::string& text, const RunConfig& c, std::ostream& out) {
  if (c.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw UsageError("cannot write " + c.out);
  f << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

int status_code(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal:
      return exit_code::kOk;
    case SolveStatus::max_iterations:
      return exit_code::kNotConverged;
    case SolveStatus::infeasible:
      return exit_code::kInfeasible;
  }
  return exit_code::kNotConverged;
}

SolverOptions solver_options(const RunConfig& c) {
  SolverOptions o;
  if (c.tol > 0.0) o.tol = c.tol;
  o.seed = c.seed;
  return o;
}

const std::string& require(const std::string& path, const char* flag) {
  if (path.empty()) throw UsageError(std::string("missing required option ") + flag);
  return path;
}

template <typename F>
auto load(const std::string& path, const char* flag, F parse) {
  try {
    return parse(io::read_json(require(path, flag)));
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
}

Ensemble load_ensemble(const RunConfig& c) {
  return load(c.ensemble, "--ensemble", [](const Json& j) { return io::ensemble_from_json(j); });
}
std::vector<ConeGenerators> load_cones(const RunConfig& c) {
  return load(c.cones, "--cones", [](const Json& j) { return io::cones_from_json(j); });
}
Measurement load_measurement(const RunConfig& c) {
  return load(c.measurement, "--measurement", [](const Json& j) { return io::measurement_from_json(j); });
}
HermitianOperator load_certificate(const RunConfig& c) {
  return load(c.certificate, "--certificate", [](const Json& j) { return io::certificate_from_json(j); });
}

int cmd_example(const std::string& name, const RunConfig& c, std::ostream& out) {
  ExampleFixtures fx;
  ExampleKind kind = ExampleKind::example1;
  if (name == "example1") {
    fx = build_example1();
  } else {
    if (c.d < 3) throw UsageError("d must be ≥ 3");
    try {
      fx = build_example2(c.d, dimension_cap());
    } catch (const UsageError&) {
      throw;
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    kind = ExampleKind::example2;
  }
  const std::vector<ConeGenerators> cones = sep_cones_example(fx.ensemble, kind);

  const fs::path dir = c.out.empty() ? fs::path(".") : fs::path(c.out);
  fs::create_directories(dir);
  const std::vector<std::pair<std::string, Json>> files = {
      {"ensemble.json", io::to_json(fx.ensemble)},
      {"global_measurement.json", io::to_json(fx.global_measurement)},
      {"certificate_K.json", io::certificate_to_json(fx.K, "K")},
      {"certificate_H.json", io::certificate_to_json(fx.H, "H")},
      {"separable_measurement.json", io::to_json(fx.separable_measurement)},
      {"cones.json", io::to_json(fx.ensemble.dims, cones)},
  };
  for (const auto& [file, j] : files) io::write_json(j, dir / file);

  const std::string fmt = format_or(c, "text");
  if (fmt == "json") {
    Json files_j = Json::array();
    for (const auto& f : files) files_j.push_back((dir / f.first).string());
    out << dump({{"example", name},
                 {"n", fx.ensemble.size()},
                 {"dims", io::to_json(fx.ensemble.dims)},
                 {"dimension", fx.ensemble.dims.total()},
                 {"fixture_trace_K", fx.K.trace()},
                 {"fixture_trace_H", fx.H.trace()},
                 {"files", files_j}});
  } else if (fmt == "csv") {
    out << "example,n,dims,dimension,trace_K,trace_H\n"
        << name << ',' << fx.ensemble.size() << ',' << dims_label(fx.ensemble.dims) << ','
        << fx.ensemble.dims.total() << ',' << fmt6(fx.K.trace()) << ',' << fmt6(fx.H.trace()) << '\n';
  } else {
    out << name << ": n=" << fx.ensemble.size() << ", dims " << dims_label(fx.ensemble.dims)
        << ", D=" << fx.ensemble.dims.total() << '\n'
        << "  Tr K = " << fmt6(fx.K.trace()) << "  Tr H = " << fmt6(fx.H.trace()) << '\n';
    for (const auto& f : files) out << "  wrote " << (dir / f.first).string() << '\n';
  }
  return exit_code::kOk;
}

std::string solve_text(const SolveReport& r, const std::string& kind) {
  std::ostringstream os;
  os << kind << ": value " << fmt6(r.value) << " (" << to_string(r.status) << ")\n"
     << "  residuals primal " << fmt6(r.residuals.primal) << " dual " << fmt6(r.residuals.dual) << " gap "
     << fmt6(r.residuals.gap) << '\n'
     << "  iterations " << r.iterations << " seed " << r.seed << " tol " << fmt6(r.tolerance) << '\n';
  for (std::size_t i : r.never_identified) os << "  state " << i << " is never identified\n";
  return os.str();
}

int cmd_solve(const RunConfig& c, std::ostream& out) {
  if (c.kind != "global" && c.kind != "sep-bound") throw UsageError("solve kind must be global or sep-bound");
  const Ensemble e = load_ensemble(c);
  const SolverOptions options = solver_options(c);
  SolveReport r;
  if (c.kind == "global") {
    r = compute_p_global(e, options);
  } else {
    if (c.cones.empty()) throw UsageError("sep-bound requires --cones");
    r = compute_q_sep_bound(e, load_cones(c), options);
  }
  const Json report = io::to_json(r, c.kind);
  const std::string fmt = format_or(c, "text");
  if (!c.out.empty()) io::write_json(report, c.out);
  if (fmt == "json") {
    if (c.out.empty()) out << dump(report);
  } else if (fmt == "csv") {
    out << "kind,status,value,primal,dual,gap,iterations\n"
        << c.kind << ',' << to_string(r.status) << ',' << fmt6(r.value) << ',' << fmt6(r.residuals.primal) << ','
        << fmt6(r.residuals.dual) << ',' << fmt6(r.residuals.gap) << ',' << r.iterations << '\n';
  } else {
    out << solve_text(r, c.kind);
  }
  return status_code(r.status);
}

void print_verification(const VerificationReport& r, const std::string& kind, const RunConfig& c,
                        std::ostream& out) {
  const Json report = io::to_json(r, kind);
  if (!c.out.empty()) io::write_json(report, c.out);
  const std::string fmt = format_or(c, "text");
  if (fmt == "json") {
    if (c.out.empty()) out << dump(report);
  } else if (fmt == "csv") {
    out << "id,residual,passed\n";
    for (const auto& cond : r.conditions)
      out << cond.id << ',' << fmt6(cond.residual) << ',' << (cond.passed ? "true" : "false") << '\n';
  } else {
    out << kind << ": " << (r.pass ? "pass" : "fail") << " (tol " << fmt6(r.tolerance) << ")\n";
    for (const auto& cond : r.conditions)
      out << "  " << std::left << std::setw(22) << cond.id << fmt6(cond.residual) << (cond.passed ? "" : "  FAIL")
          << (cond.note.empty() ? "" : "  [" + cond.note + "]") << '\n';
    if (r.value) out << "  certified value " << fmt6(*r.value) << '\n';
    for (const auto& n : r.notes) out << "  " << n << '\n';
  }
}

int cmd_nlwe(const RunConfig& c, std::ostream& out) {
  const Ensemble e = load_ensemble(c);
  const std::vector<ConeGenerators> cones = load_cones(c);
  const NlweWitness w = nlwe_witness(e, cones, solver_options(c));
  const Json report = {{"kind", "nlwe"},
                       {"witnessed", w.witnessed},
                       {"p_G", w.p_global},
                       {"q_bound", w.q_bound},
                       {"global_status", to_string(w.global.status)},
                       {"sep_bound_status", to_string(w.separable.status)},
                       {"note", "a true witness is sound once verify thm3 certifies q_bound"}};
  if (!c.out.empty()) io::write_json(report, c.out);
  const std::string fmt = format_or(c, "text");
  if (fmt == "json") {
    if (c.out.empty()) out << dump(report);
  } else if (fmt == "csv") {
    out << "p_G,q_bound,nlwe_witnessed\n"
        << fmt6(w.p_global) << ',' << fmt6(w.q_bound) << ',' << (w.witnessed ? "true" : "false") << '\n';
  } else {
    out << "nlwe: " << (w.witnessed ? "witnessed" : "not witnessed") << "  p_G " << fmt6(w.p_global) << "  q_bound "
        << fmt6(w.q_bound) << '\n';
  }
  const int g = status_code(w.global.status);
  return g != exit_code::kOk ? g : status_code(w.separable.status);
}

int cmd_verify(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.kind == "nlwe") return cmd_nlwe(c, out);
  if (c.kind != "prop1" && c.kind != "thm3" && c.kind != "cor3")
    throw UsageError("verify kind must be prop1, thm3, cor3 or nlwe");
  const Ensemble e = load_ensemble(c);
  const Measurement m = load_measurement(c);
  const HermitianOperator cert = load_certificate(c);
  std::vector<ConeGenerators> cones;
  if (c.kind != "prop1") cones = load_cones(c);
  const double tol = c.tol > 0.0 ? c.tol : 1e-8;

  VerificationReport r;
  try {
    if (c.kind == "prop1")
      r = verify_prop1(e, m, cert, tol);
    else if (c.kind == "thm3")
      r = verify_thm3(e, m, cert, cones, tol);
    else
      r = verify_cor3_equality(e, m, cert, cones, tol);
  } catch (const Error& ex) {
    r = VerificationReport{};
    r.tolerance = tol;
    r.notes.push_back(ex.what());
    r.finalize();
    r.pass = false;
    err << "udbound: " << ex.what() << '\n';
  }
  print_verification(r, c.kind, c, out);
  return r.pass ? exit_code::kOk : exit_code::kVerificationFailed;
}

int cmd_table(const RunConfig& c, std::ostream& out) {
  const int cap = dimension_cap();
  if (c.d_min <= c.d_max) {
    if (c.d_min < 3) throw UsageError("d must be ≥ 3");
    for (int d = c.d_min; d <= c.d_max; ++d)
      if (example2::total_dimension(d) > cap)
        throw UsageError("d = " + std::to_string(d) + " gives dimension " + std::to_string(example2::total_dimension(d)) +
                         " above the cap " + std::to_string(cap));
  }
  const SolverOptions options = solver_options(c);
  constexpr double kDeviation = 1e-5;

  struct Row {
    int d, dim;
    double p_g, q, p_closed, q_closed;
    bool witnessed, agrees;
  };
  std::vector<Row> rows;
  int code = exit_code::kOk;
  for (int d = c.d_min; d <= c.d_max; ++d) {
    const ExampleFixtures fx = build_example2(d, cap);
    const NlweWitness w = nlwe_witness(fx.ensemble, sep_cones_example(fx.ensemble, ExampleKind::example2), options);
    const double n = example2::normalization(d);
    Row row{d, fx.ensemble.dims.total(), w.p_global, w.q_bound, 2.0 / n, 1.0 / n, w.witnessed, true};
    row.agrees = std::abs(row.p_g - row.p_closed) <= kDeviation && std::abs(row.q - row.q_closed) <= kDeviation;
    if (code == exit_code::kOk) code = status_code(w.global.status);
    if (code == exit_code::kOk) code = status_code(w.separable.status);
    if (code == exit_code::kOk && !row.agrees) code = exit_code::kVerificationFailed;
    rows.push_back(row);
  }

  std::ostringstream os;
  const std::string fmt = format_or(c, "csv");
  if (fmt == "json") {
    Json arr = Json::array();
    for (const Row& r : rows)
      arr.push_back({{"d", r.d},
                     {"dim", r.dim},
                     {"p_G", r.p_g},
                     {"q_bound", r.q},
                     {"nlwe_witnessed", r.witnessed},
                     {"p_G_closed_form", r.p_closed},
                     {"q_bound_closed_form", r.q_closed},
                     {"closed_form_agrees", r.agrees}});
    os << dump(arr);
  } else if (fmt == "csv") {
    os << "d,dim,p_G,q_bound,nlwe_witnessed,p_G_closed_form,q_bound_closed_form,closed_form_check\n";
    for (const Row& r : rows)
      os << r.d << ',' << r.dim << ',' << fmt6(r.p_g) << ',' << fmt6(r.q) << ',' << (r.witnessed ? "true" : "false")
         << ',' << fmt6(r.p_closed) << ',' << fmt6(r.q_closed) << ',' << (r.agrees ? "ok" : "deviation") << '\n';
  } else {
    os << std::left << std::setw(4) << "d" << std::setw(8) << "dim" << std::setw(12) << "p_G" << std::setw(12)
       << "q_bound" << std::setw(8) << "nlwe" << "check\n";
    for (const Row& r : rows)
      os << std::setw(4) << r.d << std::setw(8) << r.dim << std::setw(12) << fmt6(r.p_g) << std::setw(12)
         << fmt6(r.q) << std::setw(8) << (r.witnessed ? "yes" : "no") << (r.agrees ? "ok" : "deviation") << '\n';
  }
  emit(os.str(), c, out);
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bounds on unambiguous discrimination of quantum-state ensembles", "udbound"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  RunConfig c;
  app.add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_option("--out", c.out, "Output path (a directory for example commands)");
  app.add_option("--tol", c.tol, "Solver or verifier tolerance")->check(CLI::PositiveNumber);
  app.add_option("--seed", c.seed, "Seed recorded in reports");

  app.add_subcommand("example1", "Write the two-qubit example ensemble and its fixtures");
  CLI::App* ex2 = app.add_subcommand("example2", "Write the d-qudit example ensemble and its fixtures");
  ex2->add_option("--d", c.d, "Local dimension")->required();

  CLI::App* solve = app.add_subcommand("solve", "Solve the global program or the separable bound");
  solve->add_option("kind", c.kind, "global or sep-bound")->required();
  solve->add_option("--ensemble", c.ensemble, "Ensemble JSON")->required();
  solve->add_option("--cones", c.cones, "Cone generators JSON");

  CLI::App* verify = app.add_subcommand("verify", "Check an optimality certificate");
  verify->add_option("kind", c.kind, "prop1, thm3, cor3 or nlwe")->required();
  verify->add_option("--ensemble", c.ensemble, "Ensemble JSON")->required();
  verify->add_option("--measurement", c.measurement, "Measurement JSON");
  verify->add_option("--certificate", c.certificate, "Certificate JSON");
  verify->add_option("--cones", c.cones, "Cone generators JSON");

  CLI::App* table = app.add_subcommand("table", "Scan the d-qudit example over a range of d");
  table->add_option("--d-min", c.d_min, "Smallest d");
  table->add_option("--d-max", c.d_max, "Largest d");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_code::kOk : exit_code::kUsage;
  }

  try {
    const CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "example1" || name == "example2") return cmd_example(name, c, out);
    if (name == "solve") return cmd_solve(c, out);
    if (name == "verify") return cmd_verify(c, out, err);
    return cmd_table(c, out);
  } catch (const UsageError& e) {
    err << "udbound: " << e.what() << '\n';
    return exit_code::kUsage;
  } catch (const std::exception& e) {
    err << "udbound: " << e.what() << '\n';
    return exit_code::kUsage;
  }
}

}  // namespace udbound::cli
