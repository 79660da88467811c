// svshrink: coefficient lookup, matrix denoising, AMSE curves, Monte-Carlo
// sweeps and table regeneration for singular-value shrinkage.
//
// Exit codes: 0 success, 1 check failure, 2 usage/parse error, 3 domain error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "svshrink/svshrink.hpp"

namespace {

using namespace svshrink;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDomain = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fixed(double v, int decimals) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(decimals) << v;
  return os.str();
}

// ---- coef -----------------------------------------------------------------

struct CoefOptions {
  double beta = 1.0;
  std::string mode = "known";
  std::string format = "text";
};

int run_coef(const CoefOptions& opt) {
  if (!(opt.beta > 0.0) || !std::isfinite(opt.beta)) {
    throw UsageError("--beta must be a positive finite number");
  }
  double b = opt.beta;
  if (b > 1.0) {
    std::cerr << "note: beta > 1 inverted to " << io::format_number(1.0 / b)
              << " (the matrix is treated in transposed orientation)\n";
    b = 1.0 / b;
  }
  const AspectRatio beta(b);
  const double mu = mp_median(beta);
  double value = 0.0;
  if (opt.mode == "known") {
    value = lambda_star(beta);
  } else if (opt.mode == "unknown") {
    value = lambda_star(beta) / std::sqrt(mu);
  } else {
    value = omega_approx(beta);
  }
  if (opt.format == "json") {
    std::cout << json{{"beta", b},
                      {"mode", opt.mode},
                      {"coefficient", value},
                      {"mu_beta", mu},
                      {"bulk_edge", bulk_edge(beta)}}
                     .dump(2)
              << '\n';
  } else if (opt.format == "csv") {
    std::cout << "beta,mode,coefficient,mu_beta,bulk_edge\n"
              << io::format_number(b) << ',' << opt.mode << ',' << io::format_number(value) << ','
              << io::format_number(mu) << ',' << io::format_number(bulk_edge(beta)) << '\n';
  } else {
    std::cout << "beta        " << io::format_number(b) << '\n'
              << "mode        " << opt.mode << '\n'
              << "coefficient " << io::format_number(value) << '\n'
              << "mu_beta     " << io::format_number(mu) << '\n'
              << "bulk_edge   " << io::format_number(bulk_edge(beta)) << '\n';
  }
  return kExitOk;
}

// ---- denoise --------------------------------------------------------------

struct DenoiseOptions {
  std::string input;
  std::string output;
  std::string report;
  std::string rule;
  double sigma = 0.0;
  bool sigma_given = false;
  std::string format = "json";
};

int run_denoise(const DenoiseOptions& opt) {
  Matrix y;
  try {
    y = io::read_matrix_csv(opt.input);
  } catch (const ParseError& e) {
    throw UsageError(e.what());
  }
  DenoiseReport report;
  if (!opt.rule.empty()) {
    if (!opt.sigma_given) {
      throw UsageError("--rule needs --sigma");
    }
    const Decomposition d(y);
    ShrinkageRule rule;
    try {
      rule = parse_rule(opt.rule, d.beta(), 1);
    } catch (const ParseError& e) {
      throw UsageError(e.what());
    }
    report = apply_rule(d, rule, opt.sigma);
  } else if (opt.sigma_given) {
    report = svht_known_sigma(y, opt.sigma);
  } else {
    report = svht_unknown_sigma(y);
  }

  if (!opt.output.empty()) {
    std::ofstream out(opt.output);
    if (!out) {
      throw UsageError("cannot write '" + opt.output + "'");
    }
    io::write_matrix_csv(out, report.denoised);
  } else {
    io::write_matrix_csv(std::cout, report.denoised);
  }

  const json summary = io::to_json(report);
  std::string text;
  if (opt.format == "text") {
    std::ostringstream os;
    os << "rule          " << summary["rule"].get<std::string>() << '\n'
       << "threshold     " << io::format_number(report.threshold_used) << '\n'
       << "sigma         " << io::format_number(report.sigma_used) << '\n'
       << "retained_rank " << report.retained_rank << '\n';
    text = os.str();
  } else {
    text = summary.dump(2) + "\n";
  }
  if (!opt.report.empty()) {
    std::ofstream out(opt.report);
    if (!out) {
      throw UsageError("cannot write '" + opt.report + "'");
    }
    out << text;
  } else {
    // Matrix went to stdout when no --output was given; keep the report apart.
    (opt.output.empty() ? std::cerr : std::cout) << text;
  }
  return kExitOk;
}

// ---- amse -----------------------------------------------------------------

struct AmseOptions {
  std::string rule = "hard";
  double beta = 1.0;
  std::string grid = "0:0.05:4";
  std::size_t rank = 1;
  std::string format = "csv";
};

int run_amse(const AmseOptions& opt) {
  if (!(opt.beta > 0.0 && opt.beta <= 1.0)) {
    throw UsageError("--beta must lie in (0, 1]");
  }
  const AspectRatio beta(opt.beta);
  ShrinkageRule rule;
  std::vector<double> grid;
  try {
    rule = parse_rule(opt.rule, beta, opt.rank);
    grid = io::parse_grid(opt.grid);
  } catch (const ParseError& e) {
    throw UsageError(e.what());
  }
  AmseCurve curve = amse_curve(rule, beta, grid);
  for (auto& p : curve) {
    p.amse *= static_cast<double>(opt.rank);
  }
  if (opt.format == "json") {
    std::cout << json{{"rule", to_string(rule)}, {"beta", opt.beta}, {"rank", opt.rank},
                      {"curve", io::to_json(curve)}}
                     .dump(2)
              << '\n';
  } else {
    io::write_amse_curve_csv(std::cout, curve);
  }
  return kExitOk;
}

// ---- sweep ----------------------------------------------------------------

struct SweepOptions {
  std::string config;
  std::string out;
  std::size_t threads = 1;
  std::string format = "csv";
};

int run_sweep_cmd(const SweepOptions& opt) {
  io::SweepSpec spec;
  try {
    spec = io::parse_sweep_config(opt.config);
  } catch (const ParseError& e) {
    throw UsageError(e.what());
  } catch (const SpectrumTooLong& e) {
    throw UsageError(e.what());
  }
  spec.config.threads = std::max<std::size_t>(1, opt.threads);
  const SweepResult result = run_sweep(spec.config, spec.x_grid);
  std::ostringstream os;
  if (opt.format == "json") {
    os << io::to_json(result).dump(2) << '\n';
  } else {
    io::write_sweep_csv(os, result);
  }
  if (opt.out.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream out(opt.out, std::ios::binary);
    if (!out) {
      throw UsageError("cannot write '" + opt.out + "'");
    }
    out << os.str();
  }
  return kExitOk;
}

// ---- tables ---------------------------------------------------------------

int run_tables(const std::string& format) {
  const auto coef = tables::coefficient_table();
  const auto guarantees = tables::guarantee_table();
  const auto constants = tables::nuclear_constant_table();

  if (format == "json") {
    json j;
    for (const auto& r : coef) {
      j["lambda_star"].push_back({{"beta", r.beta}, {"value", r.lambda_star}});
      j["omega"].push_back({{"beta", r.beta}, {"value", r.omega}});
    }
    for (const auto& r : guarantees) {
      j["worst_case_per_rank"].push_back(
          {{"rule", r.name}, {"label", to_string(r.rule)}, {"value", io::number_json(r.value)}});
    }
    for (const auto& r : constants) {
      j["nuclear_norm_constant"].push_back(
          {{"rule", r.name}, {"label", to_string(r.rule)}, {"value", io::number_json(r.value)}});
    }
    std::cout << j.dump(2) << '\n';
    return kExitOk;
  }
  if (format == "csv") {
    std::cout << "table,key,value\n";
    for (const auto& r : coef) {
      std::cout << "lambda_star," << fixed(r.beta, 2) << ',' << fixed(r.lambda_star, 4) << '\n';
    }
    for (const auto& r : coef) {
      std::cout << "omega," << fixed(r.beta, 2) << ',' << fixed(r.omega, 4) << '\n';
    }
    for (const auto& r : guarantees) {
      std::cout << "worst_case_per_rank," << r.name << ',' << fixed(r.value, 4) << '\n';
    }
    for (const auto& r : constants) {
      std::cout << "nuclear_norm_constant," << r.name << ','
                << (std::isfinite(r.value) ? fixed(r.value, 4) : "inf") << '\n';
    }
    return kExitOk;
  }

  auto two_column = [&](const char* title, auto value_of) {
    std::cout << title << "\n  beta   value    beta   value\n";
    for (std::size_t i = 0; i < 10; ++i) {
      std::cout << "  " << fixed(coef[i].beta, 2) << "   " << fixed(value_of(coef[i]), 4)
                << "   " << fixed(coef[i + 10].beta, 2) << "   "
                << fixed(value_of(coef[i + 10]), 4) << '\n';
    }
    std::cout << '\n';
  };
  two_column("Optimal hard threshold coefficient lambda_star(beta), known noise level "
             "(tau = lambda_star * sqrt(n) * sigma)",
             [](const tables::CoefficientRow& r) { return r.lambda_star; });
  two_column("Optimal hard threshold coefficient omega(beta), unknown noise level "
             "(tau = omega * y_med)",
             [](const tables::CoefficientRow& r) { return r.omega; });
  std::cout << "Worst-case AMSE over rank-r signals, beta = 1 (multiply by r)\n";
  for (const auto& r : guarantees) {
    std::cout << "  " << std::left << std::setw(24) << r.name << std::setw(22)
              << to_string(r.rule) << fixed(r.value, 4) << "r\n";
  }
  std::cout << "\nBest constant C in worst-case AMSE <= C * nuclear norm, beta = 1\n";
  for (const auto& r : constants) {
    std::cout << "  " << std::left << std::setw(24) << r.name << std::setw(22)
              << to_string(r.rule) << (std::isfinite(r.value) ? fixed(r.value, 4) : "inf")
              << '\n';
  }
  return kExitOk;
}

// ---- check ----------------------------------------------------------------

int run_check(double perturbation, const std::string& format) {
  checks::CheckOptions options;
  options.lambda_star_offset = perturbation;
  const auto results = checks::run_analytic_checks(options);
  bool all = true;
  json j = json::array();
  for (const auto& r : results) {
    all = all && r.passed;
    if (format == "json") {
      j.push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    } else {
      std::cout << (r.passed ? "PASS  " : "FAIL  ") << r.name << "  (" << r.detail << ")\n";
    }
  }
  if (format == "json") {
    std::cout << json{{"checks", j}, {"passed", all}}.dump(2) << '\n';
  } else {
    std::cout << (all ? "all checks passed" : "some checks FAILED") << '\n';
  }
  return all ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Singular-value shrinkage for low-rank matrix denoising"};
  app.require_subcommand(1);
  const std::vector<std::string> formats{"text", "json", "csv"};

  CoefOptions coef;
  auto* coef_cmd = app.add_subcommand("coef", "Print a threshold coefficient for aspect ratio beta");
  coef_cmd->add_option("--beta", coef.beta, "Aspect ratio m/n (values > 1 are inverted)")->required();
  coef_cmd->add_option("--mode", coef.mode, "known: lambda_star, unknown: omega, approx: cubic fit to omega")
      ->check(CLI::IsMember({"known", "unknown", "approx"}));
  coef_cmd->add_option("--format", coef.format)->check(CLI::IsMember(formats));

  DenoiseOptions den;
  auto* den_cmd = app.add_subcommand(
      "denoise",
      "Denoise a CSV matrix. Default: optimal hard threshold, omega * y_med without --sigma, "
      "lambda_star * sqrt(n) * sigma with it");
  den_cmd->add_option("--input", den.input, "CSV matrix, one row per line; a non-numeric first line is skipped")
      ->required();
  den_cmd->add_option("--output", den.output, "Denoised CSV (default: stdout)");
  den_cmd->add_option("--report", den.report, "Report file (default: stdout, or stderr when the matrix goes to stdout)");
  auto* sigma_opt = den_cmd->add_option("--sigma", den.sigma, "Known noise level per entry");
  den_cmd->add_option("--rule", den.rule, "hard[:lambda] | soft[:s] | tsvd:r | opt (bulk-normalized; needs --sigma)");
  den_cmd->add_option("--format", den.format, "Report format")->check(CLI::IsMember(formats));

  AmseOptions am;
  auto* amse_cmd = app.add_subcommand("amse", "Emit the asymptotic MSE curve x -> AMSE of a rule");
  amse_cmd->add_option("--rule", am.rule, "hard[:lambda] | soft[:s] | tsvd[:r] | opt");
  amse_cmd->add_option("--beta", am.beta, "Aspect ratio in (0, 1]");
  amse_cmd->add_option("--grid", am.grid, "start:step:end or comma list of x values");
  amse_cmd->add_option("--rank", am.rank, "Number of equal signal singular values");
  amse_cmd->add_option("--format", am.format)->check(CLI::IsMember(formats));

  SweepOptions sw;
  auto* sweep_cmd = app.add_subcommand(
      "sweep",
      "Monte-Carlo MSE vs AMSE sweep from a key = value config file "
      "(keys: m, n, spectrum | rank, noise, signal, trials, seed, rules, x_grid)");
  sweep_cmd->add_option("--config", sw.config)->required();
  sweep_cmd->add_option("--out", sw.out, "Output path (default: stdout)");
  sweep_cmd->add_option("--threads", sw.threads, "Worker threads; output does not depend on it");
  sweep_cmd->add_option("--format", sw.format)->check(CLI::IsMember({"csv", "json"}));

  std::string tables_format = "text";
  auto* tables_cmd = app.add_subcommand("tables", "Regenerate coefficient and guarantee tables");
  tables_cmd->add_option("--format", tables_format)->check(CLI::IsMember(formats));

  double perturbation = 0.0;
  std::string check_format = "text";
  auto* check_cmd = app.add_subcommand("check", "Run the analytic self-checks");
  check_cmd->add_option("--perturb-lambda", perturbation, "Offset added to lambda_star (sensitivity test)")
      ->group("");
  check_cmd->add_option("--format", check_format)->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  den.sigma_given = sigma_opt->count() > 0;

  try {
    if (*coef_cmd) return run_coef(coef);
    if (*den_cmd) return run_denoise(den);
    if (*amse_cmd) return run_amse(am);
    if (*sweep_cmd) return run_sweep_cmd(sw);
    if (*tables_cmd) return run_tables(tables_format);
    if (*check_cmd) return run_check(perturbation, check_format);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const svshrink::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  }
  return kExitUsage;
}
