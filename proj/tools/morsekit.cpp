// morsekit command-line front end.
#include "morsekit/morsekit.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

using namespace morsekit;

namespace {

using Cell = std::variant<std::string, double, long long, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string csv_cell(const Cell &c) {
  if (const auto *s = std::get_if<std::string>(&c))
    return *s;
  if (const auto *d = std::get_if<double>(&c))
    return fmt(*d);
  if (const auto *i = std::get_if<long long>(&c))
    return std::to_string(*i);
  return std::get<bool>(c) ? "true" : "false";
}

nlohmann::ordered_json json_cell(const Cell &c) {
  if (const auto *s = std::get_if<std::string>(&c))
    return *s;
  if (const auto *d = std::get_if<double>(&c)) {
    if (!std::isfinite(*d))
      return nullptr;
    return std::stod(fmt(*d));
  }
  if (const auto *i = std::get_if<long long>(&c))
    return *i;
  return std::get<bool>(c);
}

std::string render(const Table &t, const std::string &format) {
  std::ostringstream os;
  if (format == "json") {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto &r : t.rows) {
      nlohmann::ordered_json obj = nlohmann::ordered_json::object();
      for (std::size_t k = 0; k < t.columns.size(); ++k)
        obj[t.columns[k]] = json_cell(r[k]);
      arr.push_back(std::move(obj));
    }
    os << arr.dump(2) << '\n';
    return os.str();
  }
  for (std::size_t k = 0; k < t.columns.size(); ++k)
    os << (k ? "," : "") << t.columns[k];
  os << '\n';
  for (const auto &r : t.rows) {
    for (std::size_t k = 0; k < r.size(); ++k)
      os << (k ? "," : "") << csv_cell(r[k]);
    os << '\n';
  }
  return os.str();
}

void emit(const Table &t, const std::string &path, const std::string &format) {
  const std::string text = render(t, format);
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f)
    throw Error(Errc::domain, "cannot open " + path + " for writing");
  f << text;
  if (!f)
    throw Error(Errc::domain, "write to " + path + " failed");
}

std::string extension(const std::string &format) {
  return format == "json" ? ".json" : ".csv";
}

struct Common {
  double A = 0, B = 0, C = 0, q = 0, lambda = 1;
  std::string out, format = "csv";

  PotentialParams params() const { return {A, B, C, q, lambda}; }
};

void add_potential(CLI::App *sub, Common &c) {
  sub->add_option("--A", c.A, "Coefficient of (e^{lambda x}+q)^-2")->required();
  sub->add_option("--B", c.B, "Coefficient of (e^{lambda x}+q)^-1")->required();
  sub->add_option("--C", c.C, "Coefficient of e^{lambda x}")->required();
  sub->add_option("--q", c.q, "Deformation q > 0")->required();
  sub->add_option("--lambda", c.lambda, "Range parameter")->capture_default_str();
}

void add_output(CLI::App *sub, Common &c, const std::string &out_help) {
  sub->add_option("--out", c.out, out_help);
  sub->add_option("--format", c.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

std::string_view kind_name(ExtremumKind k) {
  switch (k) {
  case ExtremumKind::minimum: return "minimum";
  case ExtremumKind::maximum: return "maximum";
  case ExtremumKind::inflection: return "inflection";
  }
  return "?";
}

// classify

void run_classify(const Common &c) {
  const PotentialParams p = c.params();
  const SpectralClass cls =
      p.C > 0 ? potential::classify(p) : potential::classify_unconfined(p);
  const auto ext = potential::find_extrema(p);
  Table t{{"record", "name", "x0", "value"}, {}};
  t.rows.push_back({"class", std::string(to_string(cls)), "", ""});
  for (const auto &e : ext.points)
    t.rows.push_back({"extremum", std::string(kind_name(e.kind)), e.x0, e.value});
  t.rows.push_back({"region", "boundary_degenerate", "", ext.boundary_degenerate});
  t.rows.push_back({"region", "tra_admissible", "",
                    p.A >= potential::tra_limit(p.q, p.lambda)});
  t.rows.push_back({"region", "above_blue_green", "",
                    p.A >= potential::boundary_blue_green(p.B, p.C, p.q)});
  t.rows.push_back(
      {"region", "above_red_grey", "", p.B * p.B * p.B >= 27 * p.A * p.A * p.C});
  if (p.B >= 0 && p.C > 0)
    t.rows.push_back(
        {"region", "above_green_red", "",
         p.A >= potential::boundary_green_red_geometric(p.B, p.C, p.q)});
  emit(t, c.out, c.format);
}

// phase-diagram

struct PhaseOpts {
  double C = 1, q = 0, lambda = 1;
  std::vector<double> a_range{-4, 4}, b_range{-8, 8}, q_sweep;
  int n_a = 200, n_b = 200;
  std::string prefix = "phase", format = "csv";
};

std::vector<double> sweep_values(const std::vector<double> &s) {
  const double lo = s[0], hi = s[1], step = s[2];
  if (!(step > 0) || !(hi >= lo))
    throw Error(Errc::domain, "--q-sweep needs lo <= hi and step > 0");
  std::vector<double> qs;
  const int n = int(std::floor((hi - lo) / step + 1e-9));
  for (int k = 0; k <= n; ++k)
    qs.push_back(lo + k * step);
  return qs;
}

Table boundary_table(const PhaseOpts &o, const std::vector<double> &qs) {
  Table t{{"curve", "q", "b_over_c", "a_over_c"}, {}};
  const auto bs = potential::linspace(o.b_range[0], o.b_range[1], 101);
  const auto as = potential::linspace(o.a_range[0], o.a_range[1], 101);
  const double C = o.C;
  for (double q : qs) {
    for (double b : bs)
      t.rows.push_back({"blue_green", q, b,
                        potential::boundary_blue_green(b * C, C, q) / C});
    for (double a : as)
      t.rows.push_back(
          {"red_grey", q, potential::boundary_red_grey(a * C, C) / C, a});
    for (double b : bs)
      if (b >= 0)
        t.rows.push_back({"green_red", q, b,
                          potential::boundary_green_red(b * C, C, q) / C});
    for (double b : bs)
      if (b > 3 * q * q)
        t.rows.push_back({"green_red_geometric", q, b,
                          potential::boundary_green_red_geometric(b * C, C, q) / C});
    for (double b : bs)
      t.rows.push_back({"tra_limit", q, b, potential::tra_limit(q, o.lambda) / C});
  }
  return t;
}

void run_phase_diagram(const PhaseOpts &o) {
  std::vector<double> qs;
  if (!o.q_sweep.empty())
    qs = sweep_values(o.q_sweep);
  else if (o.q > 0)
    qs = {o.q};
  else
    throw Error(Errc::domain, "phase-diagram needs --q > 0 or --q-sweep");
  const std::string ext = extension(o.format);
  for (double q : qs) {
    const auto g = potential::phase_diagram_grid({o.a_range[0], o.a_range[1]},
                                                 {o.b_range[0], o.b_range[1]},
                                                 o.n_a, o.n_b, o.C, q, o.lambda);
    Table t{{"a_over_c", "b_over_c", "class"}, {}};
    for (std::size_t ib = 0; ib < g.b_over_c.size(); ++ib)
      for (std::size_t ia = 0; ia < g.a_over_c.size(); ++ia)
        t.rows.push_back({g.a_over_c[ia], g.b_over_c[ib],
                          std::string(to_string(g.at(ia, ib)))});
    const std::string path = o.prefix + "_q" + fmt(q) + ext;
    emit(t, path, o.format);
    std::cout << path << '\n';
  }
  const std::string path = o.prefix + "_boundaries" + ext;
  emit(boundary_table(o, qs), path, o.format);
  std::cout << path << '\n';
}

// spectrum and wavefunction

struct MethodOpts {
  std::string method = "nhd";
  std::optional<double> gamma;
  int basis_size = 200;
  double x_min = -30, x_max = 8;
  int n_points = 8000;
  bool richardson = false;
  int m_points = 200;
  bool polish = false;
};

void add_method(CLI::App *sub, MethodOpts &m, std::vector<std::string> methods) {
  sub->add_option("--method", m.method, "Solver")
      ->check(CLI::IsMember(methods))
      ->capture_default_str();
  sub->add_option("--gamma", m.gamma, "Laguerre index (nhd); plateau scan if omitted");
  sub->add_option("--basis-size", m.basis_size, "Laguerre basis size (nhd)")
      ->capture_default_str();
  sub->add_option("--grid-min", m.x_min, "Left end of the fdm box")
      ->capture_default_str();
  sub->add_option("--grid-max", m.x_max, "Right end of the fdm box")
      ->capture_default_str();
  sub->add_option("--n-points", m.n_points, "Interior fdm points")
      ->capture_default_str();
  sub->add_flag("--richardson", m.richardson, "Richardson-extrapolate (fdm)");
  sub->add_option("--m-points", m.m_points, "Scan energies (pps)")
      ->capture_default_str();
  sub->add_flag("--polish", m.polish, "Root-polish fitted energies (pps)");
}

NhdConfig nhd_config(const PotentialParams &p, const MethodOpts &m) {
  if (m.gamma)
    return {m.basis_size, *m.gamma};
  std::vector<double> gammas;
  for (int k = 1; k <= 8; ++k)
    gammas.push_back(0.5 * k);
  const auto scan = nhd::plateau_scan(p, m.basis_size, gammas);
  return {m.basis_size, scan.rows[scan.recommended].gamma};
}

FdmConfig fdm_config(const MethodOpts &m) {
  return {m.x_min, m.x_max, m.n_points, m.richardson, true};
}

Spectrum pps_run(const PotentialParams &p, const MethodOpts &m) {
  potential::to_uparams(p);
  auto cfg = pps::default_config(p);
  if (!cfg) {
    Spectrum sp;
    sp.method = Method::pps;
    sp.params = p;
    sp.diagnostic_name = "fit_residual";
    return sp;
  }
  cfg->m_points = m.m_points;
  cfg->polish = m.polish;
  return pps::pps_spectrum(p, *cfg);
}

Spectrum compute_spectrum(const PotentialParams &p, const MethodOpts &m) {
  if (m.method == "nhd")
    return nhd::nhd_spectrum(p, nhd_config(p, m));
  if (m.method == "fdm")
    return fdm::fdm_spectrum(p, fdm_config(m));
  if (m.method == "diag")
    return tra::diag_spectrum(p);
  return pps_run(p, m);
}

void run_spectrum(const Common &c, const MethodOpts &m) {
  const auto sp = compute_spectrum(c.params(), m);
  Table t{{"method", "level", "energy", "diagnostic_name", "diagnostic",
           "uncertainty", "near_threshold"},
          {}};
  for (const auto &l : sp.levels)
    t.rows.push_back({std::string(to_string(sp.method)), (long long)l.index,
                      l.energy, sp.diagnostic_name, l.diagnostic, l.uncertainty,
                      l.near_threshold});
  emit(t, c.out, c.format);
}

struct WaveOpts {
  std::vector<int> levels{0};
  double x_min = -15, x_max = 6;
  int n_x = 4201;
};

std::string out_of_range(int level, std::size_t available) {
  return "level " + std::to_string(level) + " out of range, " +
         std::to_string(available) + " available";
}

std::vector<double> interpolate(const std::vector<double> &x,
                                const std::vector<double> &y,
                                const std::vector<double> &xs) {
  std::vector<double> out(xs.size(), 0.0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] < x.front() || xs[i] > x.back())
      continue;
    std::size_t k = std::size_t(std::upper_bound(x.begin(), x.end(), xs[i]) - x.begin());
    k = std::clamp<std::size_t>(k, 1, x.size() - 1) - 1;
    const double t = (xs[i] - x[k]) / (x[k + 1] - x[k]);
    out[i] = (1 - t) * y[k] + t * y[k + 1];
  }
  return out;
}

void run_wavefunction(const Common &c, const MethodOpts &m, const WaveOpts &w) {
  const PotentialParams p = c.params();
  if (w.n_x < 2 || !(w.x_min < w.x_max))
    throw Error(Errc::domain, "wavefunction needs --x-min < --x-max and --n-x >= 2");
  const auto xs = potential::linspace(w.x_min, w.x_max, w.n_x);
  const std::string prefix = c.out.empty() ? "psi" : c.out;
  std::optional<NhdConfig> ncfg;
  std::optional<Spectrum> pps_sp;
  for (int level : w.levels) {
    std::vector<double> psi;
    if (m.method == "nhd") {
      if (!ncfg)
        ncfg = nhd_config(p, m);
      psi = nhd::nhd_wavefunction(p, *ncfg, level, xs);
    } else if (m.method == "pps") {
      if (!pps_sp)
        pps_sp = pps_run(p, m);
      if (level < 0 || std::size_t(level) >= pps_sp->size())
        throw Error(Errc::domain, "wavefunction: " + out_of_range(level, pps_sp->size()));
      const double e = pps_sp->levels[std::size_t(level)].energy;
      const auto st = tra::basis_state(p, e);
      psi = tra::assemble_wavefunction(st.uparams, pps::pps_wavefunction_coeffs(p, e),
                                       p, xs);
    } else {
      const auto st = fdm::fdm_wavefunction(p, fdm_config(m), level);
      psi = interpolate(st.x, st.psi, xs);
      wavefunction::normalize(xs, psi);
    }
    Table t{{"x", "psi"}, {}};
    for (std::size_t i = 0; i < xs.size(); ++i)
      t.rows.push_back({xs[i], psi[i]});
    const std::string path = prefix + "_level" + std::to_string(level) + extension(c.format);
    emit(t, path, c.format);
    std::cout << path << '\n';
  }
}

// pps-table

struct TableOpts {
  std::optional<double> e_min, e_max;
  int m_points = 200;
  int n_requested = 64;
};

void run_pps_table(const Common &c, const TableOpts &o) {
  const PotentialParams p = c.params();
  potential::to_uparams(p);
  Table t{{"energy", "level", "b"}, {}};
  std::optional<PpsConfig> cfg = pps::default_config(p);
  if (o.e_min || o.e_max) {
    if (!cfg)
      cfg = PpsConfig{};
    if (o.e_min)
      cfg->e_min = *o.e_min;
    if (o.e_max)
      cfg->e_max = *o.e_max;
  }
  if (cfg) {
    cfg->m_points = o.m_points;
    cfg->n_requested = o.n_requested;
    for (const auto &r : pps::pps_scan(p, *cfg).rows)
      for (std::size_t n = 0; n < r.b_values.size(); ++n)
        t.rows.push_back({r.energy, (long long)n, r.b_values[n]});
  }
  emit(t, c.out, c.format);
}

// plateau

struct PlateauOpts {
  double g_min = 0.5, g_max = 4.0, g_step = 0.5;
  int basis_size = 200;
};

void run_plateau(const Common &c, const PlateauOpts &o) {
  std::vector<double> gammas;
  if (!(o.g_step > 0) || !(o.g_max >= o.g_min))
    throw Error(Errc::domain, "plateau needs --gamma-min <= --gamma-max, --gamma-step > 0");
  const int n = int(std::floor((o.g_max - o.g_min) / o.g_step + 1e-9));
  for (int k = 0; k <= n; ++k)
    gammas.push_back(o.g_min + k * o.g_step);
  const auto scan = nhd::plateau_scan(c.params(), o.basis_size, gammas);
  Table t{{"gamma", "score", "recommended", "level", "energy"}, {}};
  for (std::size_t i = 0; i < scan.rows.size(); ++i) {
    const auto &row = scan.rows[i];
    for (const auto &l : row.spectrum.levels)
      t.rows.push_back({row.gamma, row.score, i == scan.recommended,
                        (long long)l.index, l.energy});
  }
  emit(t, c.out, c.format);
}

int exit_code(Errc e) {
  return e == Errc::numerical_failure || e == Errc::singular_parameter ? 3 : 2;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Bound states and spectral classes of the deformed Morse-like potential"};
  app.require_subcommand(1);

  Common c;
  MethodOpts m;

  auto *classify = app.add_subcommand("classify", "Spectral class, extrema and region tests");
  add_potential(classify, c);
  add_output(classify, c, "Output file (stdout if omitted)");

  PhaseOpts ph;
  auto *phase = app.add_subcommand("phase-diagram", "Classified (A/C, B/C) grids and boundary curves");
  phase->add_option("--C", ph.C, "C > 0")->capture_default_str();
  phase->add_option("--q", ph.q, "Deformation q");
  phase->add_option("--lambda", ph.lambda)->capture_default_str();
  phase->add_option("--a-range", ph.a_range, "A/C range lo,hi")->expected(2)->delimiter(',');
  phase->add_option("--b-range", ph.b_range, "B/C range lo,hi")->expected(2)->delimiter(',');
  phase->add_option("--n-a", ph.n_a, "Grid columns")->capture_default_str();
  phase->add_option("--n-b", ph.n_b, "Grid rows")->capture_default_str();
  phase->add_option("--q-sweep", ph.q_sweep, "q values lo,hi,step")->expected(3)->delimiter(',');
  phase->add_option("--out", ph.prefix, "Output file prefix")->capture_default_str();
  phase->add_option("--format", ph.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  auto *spectrum = app.add_subcommand("spectrum", "Bound-state energies");
  add_potential(spectrum, c);
  add_output(spectrum, c, "Output file (stdout if omitted)");
  add_method(spectrum, m, {"nhd", "pps", "fdm", "diag"});

  WaveOpts w;
  auto *wave = app.add_subcommand("wavefunction", "Sampled, normalized bound states");
  add_potential(wave, c);
  add_output(wave, c, "Output file prefix, one file per level");
  add_method(wave, m, {"nhd", "pps", "fdm"});
  wave->add_option("--level", w.levels, "Levels, comma separated")->delimiter(',');
  wave->add_option("--x-min", w.x_min)->capture_default_str();
  wave->add_option("--x-max", w.x_max)->capture_default_str();
  wave->add_option("--n-x", w.n_x, "Samples")->capture_default_str();

  TableOpts to;
  auto *table = app.add_subcommand("pps-table", "Raw PPS scan: B values per trial energy");
  add_potential(table, c);
  add_output(table, c, "Output file (stdout if omitted)");
  table->add_option("--e-min", to.e_min, "Lowest scan energy");
  table->add_option("--e-max", to.e_max, "Highest scan energy");
  table->add_option("--m-points", to.m_points)->capture_default_str();
  table->add_option("--n-requested", to.n_requested, "Cap on the basis size")
      ->capture_default_str();

  PlateauOpts po;
  auto *plateau = app.add_subcommand("plateau", "NHD spectra across gamma");
  add_potential(plateau, c);
  add_output(plateau, c, "Output file (stdout if omitted)");
  plateau->add_option("--gamma-min", po.g_min)->capture_default_str();
  plateau->add_option("--gamma-max", po.g_max)->capture_default_str();
  plateau->add_option("--gamma-step", po.g_step)->capture_default_str();
  plateau->add_option("--basis-size", po.basis_size)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0)
      return app.exit(e);
    std::cerr << "error: usage: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*classify)
      run_classify(c);
    else if (*phase)
      run_phase_diagram(ph);
    else if (*spectrum)
      run_spectrum(c, m);
    else if (*wave)
      run_wavefunction(c, m, w);
    else if (*table)
      run_pps_table(c, to);
    else if (*plateau)
      run_plateau(c, po);
  } catch (const Error &e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception &e) {
    std::cerr << "error: numerical_failure: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
