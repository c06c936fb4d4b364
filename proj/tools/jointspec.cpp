// Command-line front end. Exit status: 0 all requested checks pass, 1 a check
// failed, 2 bad input or usage, 3 numerical refusal (blow-up, non-normal A1,
// unmet hypotheses).

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "jointspec/analysis.hpp"
#include "jointspec/coxeter.hpp"
#include "jointspec/errors.hpp"
#include "jointspec/fixtures.hpp"
#include "jointspec/io.hpp"
#include "jointspec/linalg.hpp"

namespace {

using namespace jointspec;
using io::Json;

enum Exit { kOk = 0, kCheckFailed = 1, kBadInput = 2, kRefused = 3 };

struct RunConfig {
  std::string command;
  std::string input;
  std::string out;
  std::optional<double> tol;
  double t_max = 1e-2;
  int samples = 8;
  std::uint64_t seed = 1;
  double epsilon = 0.15;
  int quad_cap = 1 << 14;
  double quad_tol = 1e-10;
  bool run_anyway = false;
  std::string svg;
  GridSpec grid;
};

AnalysisOptions analysis_options(const RunConfig& c) {
  AnalysisOptions a;
  a.branches.t_max = c.t_max;
  a.branches.samples = c.samples;
  a.quadrature.max_points = c.quad_cap;
  a.quadrature.tol = c.quad_tol;
  return a;
}

Json config_json(const RunConfig& c, double tol) {
  return {{"t_max", c.t_max},     {"samples", c.samples},   {"seed", c.seed},
          {"epsilon", c.epsilon}, {"quad_cap", c.quad_cap}, {"quad_tol", c.quad_tol},
          {"tol", tol},           {"run_anyway", c.run_anyway}};
}

Json envelope(const RunConfig& c, double tol) {
  return {{"schema_version", io::kSchemaVersion}, {"command", c.command}, {"config", config_json(c, tol)}};
}

void emit(const RunConfig& c, const std::string& text) {
  if (c.out.empty() || c.out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw ParseError("cannot write " + c.out);
  f << text;
}

void emit_json(const RunConfig& c, const Json& j) { emit(c, j.dump(2) + "\n"); }

MatrixTuple load_pair(const RunConfig& c) {
  const auto tuple = io::parse_tuple(io::read_json_file(c.input));
  if (tuple.size() != 2) throw DimensionMismatch("this command needs a pair (n = 2)");
  return tuple;
}

Json blowup_json(const BlowUpError& e) {
  Json pts = Json::array();
  for (const auto& [t, n] : e.profile()) pts.push_back({{"t", t}, {"norm", io::number(n)}});
  return {{"kind", "blow_up"}, {"message", e.what()}, {"exponent", io::number(e.exponent())}, {"profile", pts}};
}

int refuse(const RunConfig& c, Json report, const Json& refusal) {
  report["refusal"] = refusal;
  emit_json(c, report);
  std::cerr << "refused: " << refusal["message"].get<std::string>();
  if (refusal.contains("exponent") && refusal["exponent"].is_number()) {
    std::cerr << " (norm exponent " << refusal["exponent"].get<double>() << ")";
  }
  std::cerr << "\n";
  return kRefused;
}

int run_analyze(const RunConfig& c) {
  const auto tuple = load_pair(c);
  const auto opts = analysis_options(c);
  Json report = envelope(c, 0.0);
  report["input"] = io::tuple_json(tuple);
  try {
    if (!normality(tuple[0]).is_normal) refuse_non_normal(tuple, opts);
  } catch (const BlowUpError& e) {
    return refuse(c, report, blowup_json(e));
  } catch (const NotNormalError& e) {
    return refuse(c, report, {{"kind", "not_normal"}, {"message", e.what()}});
  }
  const auto analysis = analyze_pair(tuple, opts);
  report["analysis"] = io::to_json(analysis);
  emit_json(c, report);
  return analysis.regular_everywhere() ? kOk : kCheckFailed;
}

int run_verify(const RunConfig& c) {
  const auto tuple = load_pair(c);
  VerifyOptions opts;
  opts.analysis = analysis_options(c);
  opts.tolerance = c.tol.value_or(1e-5);
  opts.run_anyway = c.run_anyway;
  Json report = envelope(c, opts.tolerance);
  report["input"] = io::tuple_json(tuple);
  try {
    const auto result = verify_pair(tuple, opts);
    report["verification"] = io::to_json(result);
    emit_json(c, report);
    return result.all_pass() ? kOk : kCheckFailed;
  } catch (const BlowUpError& e) {
    return refuse(c, report, blowup_json(e));
  } catch (const NotNormalError& e) {
    return refuse(c, report, {{"kind", "not_normal"}, {"message", e.what()}});
  } catch (const HypothesisError& e) {
    return refuse(c, report, {{"kind", "hypothesis"}, {"message", e.what()}});
  }
}

int run_coxeter(const RunConfig& c) {
  const auto config = io::parse_coxeter_config(io::read_json_file(c.input));
  RigidityOptions opts;
  opts.epsilon = c.epsilon;
  opts.seed = c.seed;
  opts.residual_tol = c.tol.value_or(1e-7);
  opts.check_pair_regularity = true;
  const auto result = rigidity_check(config.tuple, config.rep, opts);
  Json report = envelope(c, opts.residual_tol);
  report["config"]["membership_tol"] = opts.membership_tol;
  report["config"]["character_tol"] = opts.character_tol;
  report["config"]["samples_I"] = opts.samples_I;
  report["config"]["samples_II"] = opts.samples_II;
  report["config"]["samples_restriction"] = opts.samples_restriction;
  report["config"]["word_length_cap"] = opts.word_length_cap;
  report["representation"] = io::to_json(config.rep);
  report["input"] = io::tuple_json(config.tuple);
  report["rigidity"] = io::to_json(result);
  emit_json(c, report);
  const bool third = !result.group.non_special || result.conclusion_3;
  return result.conditions_hold() && result.conclusion_1 && result.conclusion_2 && third ? kOk : kCheckFailed;
}

std::string svg_plot(const std::vector<PencilPoint>& pts, const GridSpec& g) {
  const double w = 480, h = 480;
  std::ostringstream s;
  s << std::setprecision(6);
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  auto px = [&](double x) { return (x - g.x1_min) / (g.x1_max - g.x1_min) * w; };
  auto py = [&](double y) { return h - (y - g.x2_min) / (g.x2_max - g.x2_min) * h; };
  s << "<line x1=\"" << px(g.x1_min) << "\" y1=\"" << py(0) << "\" x2=\"" << px(g.x1_max) << "\" y2=\"" << py(0)
    << "\" stroke=\"#bbb\"/>\n";
  s << "<line x1=\"" << px(0) << "\" y1=\"" << py(g.x2_min) << "\" x2=\"" << px(0) << "\" y2=\"" << py(g.x2_max)
    << "\" stroke=\"#bbb\"/>\n";
  for (const auto& p : pts) {
    if (std::abs(p(0).imag()) > 1e-8 || std::abs(p(1).imag()) > 1e-8) continue;  // real slice only
    s << "<circle cx=\"" << px(p(0).real()) << "\" cy=\"" << py(p(1).real()) << "\" r=\"1.5\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

int run_plot(const RunConfig& c) {
  const auto tuple = load_pair(c);
  const auto pts = sample_spectrum_curve(tuple, c.grid);
  std::ostringstream csv;
  csv << std::setprecision(17) << "x1_re,x1_im,x2_re,x2_im\n";
  for (const auto& p : pts) {
    csv << p(0).real() << ',' << p(0).imag() << ',' << p(1).real() << ',' << p(1).imag() << '\n';
  }
  emit(c, csv.str());
  if (!c.svg.empty()) {
    std::ofstream f(c.svg);
    if (!f) throw ParseError("cannot write " + c.svg);
    f << svg_plot(pts, c.grid);
  }
  return kOk;
}

int run_demo_blowup(const RunConfig& c) {
  const auto tuple = c.input.empty() ? fixtures::nonnormal_counterexample() : load_pair(c);
  const auto opts = analysis_options(c);
  Json report = envelope(c, 0.0);
  report["input"] = io::tuple_json(tuple);

  // Four points per decade over [1e-4, 1e-1].
  std::vector<double> ts;
  for (int k = 0; k <= 12; ++k) ts.push_back(std::pow(10.0, -1.0 - 0.25 * k));

  std::vector<Complex> lambdas;
  for (Complex mu : linalg::eigenvalues(tuple[0])) {
    bool seen = false;
    for (Complex l : lambdas) seen = seen || std::abs(l - mu) <= 1e-6 * std::max(1.0, std::abs(mu));
    if (!seen) lambdas.push_back(mu);
  }
  Direction xhat(1);
  xhat(0) = 1.0;

  Json per = Json::array();
  double worst_exponent = 0.0;
  bool blew_up = false;
  for (Complex lam : lambdas) {
    for (const auto& b : local_branches(tuple, lam, xhat, opts.branches)) {
      Json entry = io::to_json(b);
      entry["profile"] = io::to_json(projection_norm_profile(tuple, b, ts, opts.quadrature));
      entry["P_at_t_max"] = io::matrix_json(component_projection(tuple, b, ts.front(), opts.quadrature).matrix);
      try {
        entry["limit"] = io::to_json(limit_projection(tuple, b, opts.quadrature));
      } catch (const BlowUpError& e) {
        entry["blow_up"] = blowup_json(e);
        blew_up = true;
        worst_exponent = std::min(worst_exponent, e.exponent());
      }
      per.push_back(std::move(entry));
    }
  }
  report["branches"] = per;
  report["blow_up"] = blew_up;
  report["exponent"] = io::number(worst_exponent);
  emit_json(c, report);
  if (blew_up) {
    std::cerr << "blow-up: component projection norms grow like t^" << worst_exponent << " as t -> 0\n";
    return kRefused;
  }
  return kOk;
}

void add_common(CLI::App* sub, RunConfig& c, bool needs_input) {
  auto* in = sub->add_option("--input,-i", c.input, "Input JSON file");
  if (needs_input) in->required()->check(CLI::ExistingFile);
  sub->add_option("--out,-o", c.out, "Output file (default stdout)");
  sub->add_option("--tol", c.tol, "Verification tolerance")->check(CLI::PositiveNumber);
  sub->add_option("--t-max", c.t_max, "Largest ladder parameter")->check(CLI::PositiveNumber);
  sub->add_option("--samples", c.samples, "Ladder length (>= 5)")->check(CLI::Range(5, 40));
  sub->add_option("--seed", c.seed, "Sampling seed");
  sub->add_option("--epsilon", c.epsilon, "Ball radius for condition (II)")->check(CLI::PositiveNumber);
  sub->add_option("--quad-cap", c.quad_cap, "Maximum quadrature nodes")->check(CLI::Range(8, 1 << 20));
  sub->add_option("--quad-tol", c.quad_tol, "Relative quadrature stabilization tolerance")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig c;
  CLI::App app{"Joint spectra of matrix pencils: branches, limit projections, projection identities, "
               "Coxeter rigidity checks"};
  app.require_subcommand(1, 1);

  auto* analyze = app.add_subcommand("analyze", "Branches, regularity and limit projections of a pair");
  add_common(analyze, c, true);
  auto* verify = app.add_subcommand("verify", "Verify the projection identities of a pair");
  add_common(verify, c, true);
  verify->add_flag("--run-anyway", c.run_anyway, "Report residuals even when hypotheses fail");
  auto* coxeter = app.add_subcommand("coxeter-check", "Rigidity pipeline for a Coxeter configuration");
  add_common(coxeter, c, true);
  auto* plot = app.add_subcommand("plot", "Sample the real slice of the proper joint spectrum");
  add_common(plot, c, true);
  plot->add_option("--svg", c.svg, "Also write an SVG of the real points");
  plot->add_option("--x1-min", c.grid.x1_min);
  plot->add_option("--x1-max", c.grid.x1_max);
  plot->add_option("--x2-min", c.grid.x2_min);
  plot->add_option("--x2-max", c.grid.x2_max);
  plot->add_option("--grid", c.grid.n1, "Cells per axis")->check(CLI::Range(1, 4096));
  auto* demo = app.add_subcommand("demo-blowup", "Norm profile of the non-normal example (or --input)");
  add_common(demo, c, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kBadInput;
  }
  c.grid.n2 = c.grid.n1;
  c.command = app.get_subcommands().front()->get_name();

  try {
    if (c.command == "analyze") return run_analyze(c);
    if (c.command == "verify") return run_verify(c);
    if (c.command == "coxeter-check") return run_coxeter(c);
    if (c.command == "plot") return run_plot(c);
    return run_demo_blowup(c);
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kBadInput;
  } catch (const DimensionMismatch& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kBadInput;
  } catch (const InconsistentAssignment& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kBadInput;
  } catch (const Error& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kRefused;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kBadInput;
  }
}
