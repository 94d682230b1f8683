#pragma once

// Sweeps, figure datasets and the oracle check behind the `tds` command-line
// tool. Output is deterministic: rows are evaluated concurrently but written
// in grid order, and files are written to a temporary name and renamed.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tds/errors.hpp"
#include "tds/fock.hpp"
#include "tds/oracle.hpp"
#include "tds/parallel.hpp"
#include "tds/params.hpp"
#include "tds/quasiprob.hpp"
#include "tds/witnesses.hpp"

namespace tds::scan {

enum class Format { csv, json };
enum class Coordinates { physical, canonical };

inline Format parse_format(std::string_view s) {
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  throw domain_error("unknown format '" + std::string(s) + "' (expected csv or json)");
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> columns = {
      "xi",  "eta", "mu",  "q",          "p",         "d",            "brightness",      "g2",
      "os",  "qfi_lower", "qfi_upper", "wnv", "nonclassical", "wigner_negative", "limit_tag"};
  return columns;
}

/// 17 significant digits, lowercase exponent.
inline std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string format_optional(const std::optional<double>& x) {
  return x ? format_number(*x) : std::string();
}

inline std::string csv_header() {
  std::string out;
  for (const auto& c : report_columns()) {
    if (!out.empty()) out += ',';
    out += c;
  }
  return out;
}

inline std::string csv_row(const WitnessReport& r) {
  std::ostringstream os;
  os << format_optional(r.xi) << ',' << format_optional(r.eta) << ',' << format_optional(r.mu) << ','
     << format_number(r.q) << ',' << format_number(r.p) << ',' << format_number(r.d) << ','
     << format_optional(r.brightness) << ',' << format_optional(r.g2) << ',' << format_number(r.os)
     << ',' << format_number(r.qfi_lower) << ',' << format_number(r.qfi_upper) << ','
     << format_number(r.wnv) << ',' << (r.nonclassical ? "true" : "false") << ','
     << (r.wigner_negative ? "true" : "false") << ',' << r.limit_tag;
  return os.str();
}

inline nlohmann::ordered_json to_json(const WitnessReport& r) {
  auto opt = [](const std::optional<double>& x) -> nlohmann::ordered_json {
    return x ? nlohmann::ordered_json(*x) : nlohmann::ordered_json(nullptr);
  };
  nlohmann::ordered_json j;
  j["xi"] = opt(r.xi);
  j["eta"] = opt(r.eta);
  j["mu"] = opt(r.mu);
  j["q"] = r.q;
  j["p"] = r.p;
  j["d"] = r.d;
  j["brightness"] = opt(r.brightness);
  j["g2"] = opt(r.g2);
  j["os"] = r.os;
  j["qfi_lower"] = r.qfi_lower;
  j["qfi_upper"] = r.qfi_upper;
  j["wnv"] = r.wnv;
  j["nonclassical"] = r.nonclassical;
  j["wigner_negative"] = r.wigner_negative;
  j["limit_tag"] = r.limit_tag;
  return j;
}

/// Extra per-row columns appended after the report columns (the fig7 preset).
struct ExtraColumn {
  std::string name;
  std::vector<double> values;
};

inline std::string render_reports(const std::vector<WitnessReport>& rows, Format format,
                                  const std::vector<std::string>& comments = {},
                                  const std::vector<ExtraColumn>& extra = {}) {
  if (format == Format::json) {
    auto arr = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      auto j = to_json(rows[i]);
      for (const auto& e : extra) j[e.name] = e.values[i];
      arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
  }
  std::string out;
  for (const auto& c : comments) out += "# " + c + "\n";
  out += csv_header();
  for (const auto& e : extra) out += "," + e.name;
  out += "\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out += csv_row(rows[i]);
    for (const auto& e : extra) out += "," + format_number(e.values[i]);
    out += "\n";
  }
  return out;
}

/// Writes to path.tmp and renames, so a failed run never leaves a partial file.
inline void write_atomically(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << content;
    f.flush();
    if (!f) {
      f.close();
      std::filesystem::remove(tmp);
      throw std::runtime_error("write to " + tmp.string() + " failed");
    }
  }
  std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

struct Axis {
  std::string name;
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;

  double value(std::size_t i) const {
    if (i + 1 == count) return max;
    return min + (max - min) * double(i) / double(count - 1);
  }
};

/// "name:min:max:count"
inline Axis parse_axis(std::string_view text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : text) {
    if (ch == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);
  if (parts.size() != 4) {
    throw domain_error("axis '" + std::string(text) + "' must have the form name:min:max:count");
  }
  try {
    std::size_t used = 0;
    const long long count = std::stoll(parts[3], &used);
    if (used != parts[3].size() || count < 0) throw std::invalid_argument("count");
    return {parts[0], std::stod(parts[1]), std::stod(parts[2]), std::size_t(count)};
  } catch (const std::logic_error&) {
    throw domain_error("axis '" + std::string(text) + "' has a malformed number");
  }
}

/// "name=value"
inline std::pair<std::string, double> parse_fixed(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) {
    throw domain_error("fixed parameter '" + std::string(text) + "' must have the form name=value");
  }
  try {
    return {std::string(text.substr(0, eq)), std::stod(std::string(text.substr(eq + 1)))};
  } catch (const std::logic_error&) {
    throw domain_error("fixed parameter '" + std::string(text) + "' has a malformed value");
  }
}

struct SweepSpec {
  std::vector<Axis> axes;
  std::vector<std::pair<std::string, double>> fixed;
  Format format = Format::csv;
  std::optional<std::filesystem::path> out;
  double epsilon = kDefaultEpsilon;
};

namespace detail {

inline const std::vector<std::string>& names_of(Coordinates c) {
  static const std::vector<std::string> physical = {"xi", "eta", "mu"};
  static const std::vector<std::string> canonical = {"q", "p", "d"};
  return c == Coordinates::physical ? physical : canonical;
}

inline std::optional<Coordinates> system_of(const std::string& name) {
  for (auto c : {Coordinates::physical, Coordinates::canonical}) {
    const auto& n = names_of(c);
    if (std::find(n.begin(), n.end(), name) != n.end()) return c;
  }
  return std::nullopt;
}

inline void check_value(const std::string& name, double v) {
  if (name == "xi") tds::detail::require(v >= 0.0 && v < 1.0, "xi", v, "0 <= xi < 1");
  else if (name == "eta") tds::detail::require(v > 0.0 && v <= 1.0, "eta", v, "0 < eta <= 1");
  else if (name == "mu") tds::detail::require(v > 0.0 && v <= 1.0, "mu", v, "0 < mu <= 1");
  else if (name == "q") tds::detail::require(v >= 0.0 && v < 1.0, "q", v, "0 <= q < 1");
  else if (name == "p") tds::detail::require(v >= 0.0 && v <= 1.0, "p", v, "0 <= p <= 1");
  else tds::detail::require(v >= 0.0 && v <= 1.0, "d", v, "0 <= d <= 1");
}

}  // namespace detail

/// Checks the spec and returns its coordinate system.
inline Coordinates validate(const SweepSpec& spec) {
  if (spec.axes.empty()) throw domain_error("sweep needs at least one axis");
  std::optional<Coordinates> system;
  std::set<std::string> seen;
  auto visit_name = [&](const std::string& name) {
    const auto c = detail::system_of(name);
    if (!c) throw domain_error("unknown parameter '" + name + "' (expected xi, eta, mu, q, p or d)");
    if (system && *system != *c) throw domain_error("physical and canonical parameters cannot be mixed");
    system = c;
    if (!seen.insert(name).second) {
      throw domain_error("parameter '" + name + "' given more than once (axes and fixed must be disjoint)");
    }
  };
  for (const auto& a : spec.axes) {
    visit_name(a.name);
    if (a.count < 2) throw domain_error("axis '" + a.name + "' needs count >= 2");
    if (!(a.min <= a.max)) throw domain_error("axis '" + a.name + "' needs min <= max");
    detail::check_value(a.name, a.min);
    detail::check_value(a.name, a.max);
  }
  for (const auto& [name, v] : spec.fixed) {
    visit_name(name);
    detail::check_value(name, v);
  }
  for (const auto& n : detail::names_of(*system)) {
    if (!seen.count(n)) throw domain_error("parameter '" + n + "' is neither an axis nor fixed");
  }
  tds::detail::require(spec.epsilon > 0.0, "epsilon", spec.epsilon, "epsilon > 0");
  return *system;
}

inline std::size_t point_count(const SweepSpec& spec) {
  std::size_t n = 1;
  for (const auto& a : spec.axes) n *= a.count;
  return n;
}

/// Parameter values of grid point `index`; the first axis varies slowest.
inline std::map<std::string, double> point_values(const SweepSpec& spec, std::size_t index) {
  std::map<std::string, double> values(spec.fixed.begin(), spec.fixed.end());
  for (std::size_t k = spec.axes.size(); k-- > 0;) {
    const auto& a = spec.axes[k];
    values[a.name] = a.value(index % a.count);
    index /= a.count;
  }
  return values;
}

inline WitnessReport evaluate_point(Coordinates system, const std::map<std::string, double>& v,
                                    const ReportOptions& opt) {
  if (system == Coordinates::physical) {
    return witness_report(PhysicalParams(v.at("xi"), v.at("eta"), v.at("mu")), opt);
  }
  return witness_report(CanonicalParams(v.at("q"), v.at("p"), v.at("d")), opt);
}

inline std::vector<WitnessReport> run_sweep(const SweepSpec& spec) {
  const auto system = validate(spec);
  const std::size_t n = point_count(spec);
  ReportOptions opt;
  opt.epsilon = spec.epsilon;
  std::vector<WitnessReport> rows(n);
  tds::detail::parallel_for(n, [&](std::size_t i) { rows[i] = evaluate_point(system, point_values(spec, i), opt); });
  return rows;
}

// ---------------------------------------------------------------------------
// Figure presets
// ---------------------------------------------------------------------------

enum class FigureId { fig3, fig4, fig5, fig6a, fig6b, fig6c, fig7 };

inline FigureId parse_figure(std::string_view s) {
  static const std::map<std::string, FigureId, std::less<>> ids = {
      {"fig3", FigureId::fig3},   {"fig4", FigureId::fig4},   {"fig5", FigureId::fig5},
      {"fig6a", FigureId::fig6a}, {"fig6b", FigureId::fig6b}, {"fig6c", FigureId::fig6c},
      {"fig7", FigureId::fig7}};
  const auto it = ids.find(s);
  if (it == ids.end()) {
    throw domain_error("unknown figure '" + std::string(s) + "' (fig3, fig4, fig5, fig6a, fig6b, fig6c, fig7)");
  }
  return it->second;
}

inline constexpr std::size_t kContourResolution = 100;
inline constexpr std::size_t kCurveResolution = 400;

inline std::string extension(Format f) { return f == Format::csv ? ".csv" : ".json"; }

inline std::string render_grid_dataset(const QuasiprobGrid& g, Format format,
                                       const std::vector<std::string>& comments) {
  const std::size_t n = g.axis.samples;
  if (format == Format::json) {
    auto arr = nlohmann::ordered_json::array();
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        const auto z = g.point(r, c);
        arr.push_back({{"re", z.real()}, {"im", z.imag()}, {"value", g.at(r, c)}});
      }
    return arr.dump(2) + "\n";
  }
  std::string out;
  for (const auto& c : comments) out += "# " + c + "\n";
  out += "re,im,value\n";
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      const auto z = g.point(r, c);
      out += format_number(z.real()) + "," + format_number(z.imag()) + "," + format_number(g.at(r, c)) + "\n";
    }
  return out;
}

inline std::string render_fock_dataset(const FockWeights& w, Format format,
                                       const std::vector<std::string>& comments) {
  if (format == Format::json) {
    auto arr = nlohmann::ordered_json::array();
    for (std::size_t n = 0; n < w.weights.size(); ++n) arr.push_back({{"n", n}, {"weight", w.weights[n]}});
    return arr.dump(2) + "\n";
  }
  std::string out;
  for (const auto& c : comments) out += "# " + c + "\n";
  out += "n,weight\n";
  for (std::size_t n = 0; n < w.weights.size(); ++n) out += std::to_string(n) + "," + format_number(w.weights[n]) + "\n";
  return out;
}

/// Brightness curves at the three transmittance settings of the trade-off plot.
inline std::vector<WitnessReport> brightness_curves(double epsilon) {
  const std::vector<std::pair<double, double>> settings = {{1.0, 1.0}, {0.8, 0.8}, {0.8, 0.5}};
  std::vector<WitnessReport> rows;
  for (const auto& [eta, mu] : settings) {
    SweepSpec spec;
    spec.axes = {{"xi", 0.001, 0.99, kCurveResolution}};
    spec.fixed = {{"eta", eta}, {"mu", mu}};
    spec.epsilon = epsilon;
    auto part = run_sweep(spec);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

/// Writes the dataset(s) of a figure into `dir` and returns the file paths.
inline std::vector<std::filesystem::path> write_figure(FigureId id, const std::filesystem::path& dir,
                                                       Format format = Format::csv,
                                                       double epsilon = kDefaultEpsilon) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& stem, const std::string& content) {
    const auto path = dir / (stem + extension(format));
    write_atomically(path, content);
    written.push_back(path);
  };

  switch (id) {
    case FigureId::fig3: {
      const PhysicalParams pp(0.5, 0.5, 0.5);
      const auto cp = canonical_from_physical(pp);
      const AxisSpec axis{2.5, 101};
      const std::string where = "xi=eta=mu=0.5, (q,p,d)=(" + format_number(cp.q()) + "," +
                                format_number(cp.p()) + "," + format_number(cp.d()) + ")";
      emit("fig3_p", render_grid_dataset(render_grid(cp, 1.0, axis), format,
                                         {"P-function (s=1), " + where, "101x101 grid, |re|,|im| <= 2.5"}));
      emit("fig3_wigner", render_grid_dataset(render_grid(cp, 0.0, axis), format,
                                              {"Wigner function (s=0), " + where, "101x101 grid, |re|,|im| <= 2.5"}));
      emit("fig3_fock", render_fock_dataset(tds_weights(cp, epsilon), format,
                                            {"photon-number distribution, " + where}));
      break;
    }
    case FigureId::fig4: {
      SweepSpec spec;
      spec.axes = {{"xi", 0.001, 0.9, kContourResolution}, {"mu", 0.001, 1.0, kContourResolution}};
      spec.fixed = {{"eta", 1.0}};
      spec.epsilon = epsilon;
      emit("fig4", render_reports(run_sweep(spec), format,
                                  {"OS contour over (xi, mu) at eta=1", "100x100 grid, xi in [0.001,0.9], mu in [0.001,1]"}));
      break;
    }
    case FigureId::fig5: {
      SweepSpec spec;
      spec.axes = {{"eta", 0.01, 1.0, kContourResolution}, {"mu", 0.01, 1.0, kContourResolution}};
      spec.fixed = {{"xi", 0.05}};
      spec.epsilon = epsilon;
      emit("fig5", render_reports(run_sweep(spec), format,
                                  {"OS contour over (eta, mu) at xi=0.05", "100x100 grid, eta and mu in [0.01,1]"}));
      break;
    }
    case FigureId::fig6a:
    case FigureId::fig6b:
    case FigureId::fig6c: {
      const char* stem = id == FigureId::fig6a ? "fig6a" : id == FigureId::fig6b ? "fig6b" : "fig6c";
      const char* column = id == FigureId::fig6a ? "os" : id == FigureId::fig6b ? "qfi_upper" : "wnv";
      emit(stem, render_reports(brightness_curves(epsilon), format,
                                {std::string("witness column: ") + column + " versus brightness",
                                 "(eta,mu) in {(1,1),(0.8,0.8),(0.8,0.5)}, 400 points each, xi in [0.001,0.99]"}));
      break;
    }
    case FigureId::fig7: {
      SweepSpec spec;
      spec.axes = {{"mu", 0.001, 1.0, kCurveResolution}};
      spec.fixed = {{"xi", 0.01}, {"eta", 1.0}};
      spec.epsilon = epsilon;
      const auto rows = run_sweep(spec);
      const double single = wnv_limit(limit::SinglePhoton{});
      ExtraColumn scaled{"wnv_scaled", {}};
      for (const auto& r : rows) scaled.values.push_back(3.0 * r.wnv / single);
      emit("fig7", render_reports(rows, format,
                                  {"three witnesses at xi=0.01, eta=1 versus mu",
                                   "wnv_scaled = 3 wnv / wnv(single photon)", "400 points, mu in [0.001,1]"},
                                  {scaled}));
      break;
    }
  }
  return written;
}

// ---------------------------------------------------------------------------
// Oracle check
// ---------------------------------------------------------------------------

struct OracleCheckResult {
  double max_tv = 0.0;
  std::optional<PhysicalParams> worst;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  std::size_t max_truncation = 0;
  bool passed = false;
};

/// Compares the brute-force heralding oracle with the closed-form weights on
/// a density^3 grid over xi in [xi_min, xi_max] and eta, mu in [0.2, 1].
/// A nonzero truncation_cap bounds the oracle's Fock cutoff.
inline OracleCheckResult oracle_check(std::size_t density, double tolerance, double xi_min = 0.1,
                                      double xi_max = 0.9, double epsilon = kDefaultEpsilon,
                                      std::size_t truncation_cap = 0) {
  if (density < 2) throw domain_error("oracle-check grid density must be >= 2");
  SweepSpec spec;
  spec.axes = {{"xi", xi_min, xi_max, density}, {"eta", 0.2, 1.0, density}, {"mu", 0.2, 1.0, density}};
  validate(spec);
  const std::size_t n = point_count(spec);
  std::vector<double> tv(n, -1.0);
  std::vector<std::size_t> trunc(n, 0);
  tds::detail::parallel_for(n, [&](std::size_t i) {
    const auto v = point_values(spec, i);
    if (v.at("xi") == 0.0) return;
    const PhysicalParams pp(v.at("xi"), v.at("eta"), v.at("mu"));
    std::size_t nt = oracle::oracle_truncation(pp, epsilon);
    if (truncation_cap > 0) nt = std::min(nt, truncation_cap);
    const auto brute = oracle::oracle_conditional(pp, nt);
    const auto closed = tds_weights(canonical_from_physical(pp), epsilon);
    tv[i] = tv_distance(brute.span(), closed.span());
    trunc[i] = nt;
  });
  OracleCheckResult res;
  for (std::size_t i = 0; i < n; ++i) {
    if (tv[i] < 0.0) {
      ++res.skipped;
      continue;
    }
    ++res.evaluated;
    res.max_truncation = std::max(res.max_truncation, trunc[i]);
    if (!res.worst || tv[i] > res.max_tv) {
      res.max_tv = tv[i];
      const auto v = point_values(spec, i);
      res.worst = PhysicalParams(v.at("xi"), v.at("eta"), v.at("mu"));
    }
  }
  res.passed = res.evaluated > 0 && res.max_tv <= tolerance;
  return res;
}

}  // namespace tds::scan
