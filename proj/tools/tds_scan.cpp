// tds: witnesses of heralded thermal-difference states from the command line.
//
//   tds point --xi 0.5 --eta 0.5 --mu 0.5
//   tds sweep --axis xi:0.01:0.9:50 --fix eta=1 --fix mu=1 --out sweep.csv
//   tds figure fig6a --out data/
//   tds oracle-check --density 5 --tolerance 1e-10
//
// Exit codes: 0 success, 1 check failure, 2 usage or domain error.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tds/tds.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

struct Common {
  std::string format = "csv";
  std::string out;
  double epsilon = tds::kDefaultEpsilon;
  std::string config;
};

void add_common(CLI::App* sub, Common& c, const char* out_help) {
  sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--out", c.out, out_help);
  sub->add_option("--epsilon", c.epsilon, "Fock tail tolerance")->check(CLI::PositiveNumber);
  sub->add_option("--config", c.config, "key=value file; command-line flags take precedence");
}

// Reads `key = value` lines ('#' starts a comment). A key may repeat for
// repeatable options such as axis.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw tds::domain_error("cannot read config file " + path);
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw tds::domain_error(path + ":" + std::to_string(number) + ": expected key = value");
    }
    entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return entries;
}

// Appends config entries as flags for keys the command line does not set.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::optional<std::string> path;
  std::set<std::string> given;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const auto& a = args[i];
    if (a.rfind("--", 0) != 0) continue;
    const auto eq = a.find('=');
    const auto key = a.substr(2, eq == std::string::npos ? std::string::npos : eq - 2);
    given.insert(key);
    if (key == "config") {
      if (eq != std::string::npos) path = a.substr(eq + 1);
      else if (i + 1 < args.size()) path = args[i + 1];
    }
  }
  if (!path) return args;
  for (const auto& [key, value] : read_config(*path)) {
    if (key == "config" || given.count(key)) continue;
    args.push_back("--" + key);
    args.push_back(value);
  }
  return args;
}

void emit(const std::string& content, const std::string& out) {
  if (out.empty()) {
    std::fwrite(content.data(), 1, content.size(), stdout);
  } else {
    tds::scan::write_atomically(out, content);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonclassicality witnesses of heralded thermal-difference states", "tds"};
  app.require_subcommand(1);

  Common point_common, sweep_common, figure_common, check_common;

  auto* point = app.add_subcommand("point", "Evaluate all witnesses at one parameter point");
  std::optional<double> xi, eta, mu, q, p, d;
  point->add_option("--xi", xi, "initial brightness, 0 <= xi < 1");
  point->add_option("--eta", eta, "idler transmittance, 0 < eta <= 1");
  point->add_option("--mu", mu, "signal transmittance, 0 < mu <= 1");
  point->add_option("--q", q, "temperature of the first thermal component");
  point->add_option("--p", p, "temperature ratio of the second component");
  point->add_option("--d", d, "weight of the second component");
  add_common(point, point_common, "output file (default: stdout)");

  auto* sweep = app.add_subcommand("sweep", "Evaluate a rectangular parameter grid");
  std::vector<std::string> axis_args, fixed_args;
  sweep->add_option("--axis", axis_args, "name:min:max:count (repeatable, first is outermost)");
  sweep->add_option("--fix", fixed_args, "name=value (repeatable)");
  add_common(sweep, sweep_common, "output file (default: stdout)");

  auto* figure = app.add_subcommand("figure", "Write the dataset(s) behind a figure");
  std::string figure_id;
  figure->add_option("id", figure_id, "fig3, fig4, fig5, fig6a, fig6b, fig6c or fig7")->required();
  add_common(figure, figure_common, "output directory (default: .)");

  auto* check = app.add_subcommand("oracle-check", "Compare closed-form weights with the heralding pipeline");
  std::size_t density = 5;
  double tolerance = 1e-10;
  double xi_min = 0.1, xi_max = 0.9;
  check->add_option("--density", density, "grid points per axis (>= 2)");
  check->add_option("--tolerance", tolerance, "maximum allowed TV distance");
  check->add_option("--xi-min", xi_min, "lower end of the xi axis");
  check->add_option("--xi-max", xi_max, "upper end of the xi axis");
  std::size_t truncation_cap = 0;
  check->add_option("--max-truncation", truncation_cap, "cap on the oracle Fock cutoff (0: none)");
  add_common(check, check_common, "summary file (default: stdout)");

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = merge_config(std::move(args));
    // CLI11 consumes a reversed argument vector
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (point->parsed()) {
      const auto format = tds::scan::parse_format(point_common.format);
      tds::ReportOptions opt;
      opt.epsilon = point_common.epsilon;
      const bool physical = xi || eta || mu;
      const bool canonical = q || p || d;
      if (physical == canonical) {
        std::cerr << "error: give either --xi --eta --mu or --q --p --d\n";
        return kUsage;
      }
      tds::WitnessReport report;
      if (physical) {
        if (!(xi && eta && mu)) {
          std::cerr << "error: --xi, --eta and --mu are all required\n";
          return kUsage;
        }
        report = tds::witness_report(tds::PhysicalParams(*xi, *eta, *mu), opt);
      } else {
        if (!(q && p && d)) {
          std::cerr << "error: --q, --p and --d are all required\n";
          return kUsage;
        }
        const tds::CanonicalParams cp(*q, *p, *d);
        report = tds::witness_report(cp, opt);
        if (!report.xi) std::cerr << "note: no physical preimage (needs q > 0 and p < d)\n";
      }
      emit(tds::scan::render_reports({report}, format), point_common.out);
      return kOk;
    }

    if (sweep->parsed()) {
      tds::scan::SweepSpec spec;
      for (const auto& a : axis_args) spec.axes.push_back(tds::scan::parse_axis(a));
      for (const auto& f : fixed_args) spec.fixed.push_back(tds::scan::parse_fixed(f));
      spec.format = tds::scan::parse_format(sweep_common.format);
      spec.epsilon = sweep_common.epsilon;
      const auto rows = tds::scan::run_sweep(spec);
      emit(tds::scan::render_reports(rows, spec.format), sweep_common.out);
      return kOk;
    }

    if (figure->parsed()) {
      const auto id = tds::scan::parse_figure(figure_id);
      const auto format = tds::scan::parse_format(figure_common.format);
      const std::filesystem::path dir = figure_common.out.empty() ? "." : figure_common.out;
      for (const auto& path : tds::scan::write_figure(id, dir, format, figure_common.epsilon)) {
        std::cout << path.string() << "\n";
      }
      return kOk;
    }

    if (check->parsed()) {
      const auto format = tds::scan::parse_format(check_common.format);
      if (xi_min <= 0.0) {
        std::cerr << "notice: points with xi = 0 have zero click probability and are skipped\n";
      }
      const auto res = tds::scan::oracle_check(density, tolerance, xi_min, xi_max, check_common.epsilon,
                                                truncation_cap);
      if (res.skipped > 0) {
        std::cerr << "notice: skipped " << res.skipped << " point(s) with xi = 0\n";
      }
      std::string summary;
      const auto num = tds::scan::format_number;
      if (format == tds::scan::Format::json) {
        nlohmann::ordered_json j;
        j["passed"] = res.passed;
        j["max_tv"] = res.max_tv;
        j["tolerance"] = tolerance;
        j["evaluated"] = res.evaluated;
        j["skipped"] = res.skipped;
        j["max_truncation"] = res.max_truncation;
        if (res.worst) {
          j["worst"] = {{"xi", res.worst->xi()}, {"eta", res.worst->eta()}, {"mu", res.worst->mu()}};
        } else {
          j["worst"] = nullptr;
        }
        summary = j.dump(2) + "\n";
      } else {
        summary = std::string(res.passed ? "PASS" : "FAIL") + " max_tv=" + num(res.max_tv) +
                  " tolerance=" + num(tolerance) + " evaluated=" + std::to_string(res.evaluated) +
                  " skipped=" + std::to_string(res.skipped) +
                  " max_truncation=" + std::to_string(res.max_truncation) + "\n";
        if (res.worst) {
          summary += "worst: xi=" + num(res.worst->xi()) + " eta=" + num(res.worst->eta()) +
                     " mu=" + num(res.worst->mu()) + "\n";
        }
      }
      emit(summary, check_common.out);
      return res.passed ? kOk : kCheckFailed;
    }
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
  return kUsage;
}
