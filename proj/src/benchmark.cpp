#include "mars/benchmark.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mars/obj_io.hpp"

namespace mars {

namespace fs = std::filesystem;

std::string format_g17(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

RunConfig default_vortical_config() { return RunConfig{}; }

RunConfig default_deformation_config() {
  RunConfig config;
  config.field = "deformation";
  config.center = Vec3(0.35, 0.35, 0.35);
  return config;
}

namespace {

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

void apply_config_line(RunConfig& config, const std::string& key,
                       const std::string& value) {
  if (key == "field")
    config.field = value;
  else if (key == "T")
    config.period = std::stod(value);
  else if (key == "center") {
    const auto c = parse_double_list(value);
    if (c.size() != 3) throw MeshError("config: center needs 3 components");
    config.center = Vec3(c[0], c[1], c[2]);
  } else if (key == "radius")
    config.radius = std::stod(value);
  else if (key == "mesh")
    config.mesh_path = value;
  else if (key == "h")
    config.grid_sizes = parse_double_list(value);
  else if (key == "hL_rule")
    config.hl_rule = value;
  else if (key == "Cr")
    config.courant = std::stod(value);
  else if (key == "r_tiny")
    config.r_tiny = std::stod(value);
  else if (key == "theta")
    config.theta = std::stod(value);
  else if (key == "mu")
    config.mu = std::stoi(value);
  else if (key == "nu")
    config.nu = std::stoi(value);
  else if (key == "eta")
    config.eta = std::stoi(value);
  else if (key == "c")
    config.armijo_c = std::stod(value);
  else if (key == "rho")
    config.backtrack_rho = std::stod(value);
  else if (key == "marker_spacing")
    config.marker_spacing = std::stod(value);
  else if (key == "seed")
    config.seed = std::stoull(value);
  else if (key == "out")
    config.out_dir = value;
  else if (key == "snapshots")
    config.snapshot_times = parse_double_list(value);
  else
    throw MeshError("config: unknown key '" + key + "'");
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("config: cannot open " + path);
  RunConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw MeshError("config: expected key=value at line " +
                      std::to_string(line_no));
    apply_config_line(config, trim(line.substr(0, eq)),
                      trim(line.substr(eq + 1)));
  }
  return config;
}

VelocityField make_field(const RunConfig& config) {
  if (config.field == "vortical_shear")
    return vortical_shear_field(config.period);
  if (config.field == "deformation") return deformation_field(config.period);
  throw MeshError("config: unknown field '" + config.field + "'");
}

double resolve_hl(const std::string& rule, double h) {
  // "<scale>h", "<scale>h^<exp>", or an absolute number.
  const auto hpos = rule.find('h');
  if (hpos == std::string::npos) return std::stod(rule);
  const double scale = hpos == 0 ? 1.0 : std::stod(rule.substr(0, hpos));
  double exponent = 1.0;
  if (hpos + 1 < rule.size()) {
    if (rule[hpos + 1] != '^')
      throw MeshError("config: bad hL rule '" + rule + "'");
    exponent = std::stod(rule.substr(hpos + 2));
  }
  return scale * std::pow(h, exponent);
}

namespace {

void write_steps_header(std::ofstream& out) {
  out << "step,t_end,vertices,edges,triangles,euler,min_edge,max_edge,"
         "min_angle,splits,collapses,flips,vrem,ltr,regular\n";
}

void write_step_row(std::ofstream& out, const StepReport& r) {
  out << r.step << ',' << format_g17(r.t_end) << ',' << r.vertices << ','
      << r.edges << ',' << r.triangles << ',' << r.euler << ','
      << format_g17(r.min_edge) << ',' << format_g17(r.max_edge) << ','
      << format_g17(r.min_angle) << ',' << r.splits << ',' << r.collapses
      << ',' << r.flips << ',' << r.relocations << ',' << r.regenerations
      << ',' << (r.regular ? 1 : 0) << '\n';
}

void write_ledger(const CostLedger& ledger, const std::string& dir) {
  std::ofstream out(dir + "/ledger.csv");
  out << "tier,events,triangles,event_share,triangle_share\n";
  for (Tier tier :
       {Tier::Elementary, Tier::Relocation, Tier::Regeneration}) {
    out << tier_name(tier) << ',' << ledger.events(tier) << ','
        << ledger.triangles(tier) << ',' << format_g17(ledger.event_share(tier))
        << ',' << format_g17(ledger.triangle_share(tier)) << '\n';
  }
  // Wall time lives outside the CSVs so reruns stay byte-identical.
  std::ofstream timing(dir + "/timing.txt");
  for (Tier tier :
       {Tier::Elementary, Tier::Relocation, Tier::Regeneration}) {
    timing << tier_name(tier) << " seconds=" << ledger.seconds(tier)
           << " time_share=" << ledger.time_share(tier) << "%\n";
  }
}

}  // namespace

GridRunResult run_single_grid(const RunConfig& config, double h,
                              const std::string& out_dir) {
  GridRunResult result;
  result.h = h;
  result.h_max = resolve_hl(config.hl_rule, h);
  result.out_dir = out_dir;

  const VelocityField field = make_field(config);
  result.dt = config.courant * h / field.sup_norm;

  TriMesh mesh =
      config.mesh_path.empty()
          ? generate_sphere(config.center, config.radius,
                            config.marker_spacing * result.h_max)
          : read_obj(config.mesh_path);

  StepConfig step_config;
  step_config.regularity =
      RegularityParams{config.r_tiny, result.h_max, config.theta};
  step_config.limits =
      CascadeLimits{config.mu, config.nu, config.eta};
  step_config.line_search =
      LineSearchParams{config.armijo_c, config.backtrack_rho, 60};

  Simulation sim(std::move(mesh), field, step_config, config.seed);

  std::vector<double> snapshots = config.snapshot_times;
  if (snapshots.empty()) snapshots = {0.0, config.period};
  auto snapshot_path = [&](double t) {
    return out_dir + "/snapshot_t" + format_g17(t) + ".obj";
  };
  auto wants_snapshot = [&](double t) {
    for (double s : snapshots)
      if (std::abs(s - t) <= 1e-9) return true;
    return false;
  };

  std::ofstream steps_csv;
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    steps_csv.open(out_dir + "/steps.csv");
    write_steps_header(steps_csv);
    if (wants_snapshot(0.0)) write_obj(sim.mesh(), snapshot_path(0.0));
  }

  const double t_end = config.period;
  const int n_steps = std::max(
      1, static_cast<int>(std::ceil(t_end / result.dt - 1e-9)));
  try {
    for (int i = 0; i < n_steps; ++i) {
      const double t = i * result.dt;
      const double k = std::min(result.dt, t_end - t);
      const StepReport report = sim.step(t, k);
      result.steps.push_back(report);
      if (steps_csv.is_open()) {
        write_step_row(steps_csv, report);
        steps_csv.flush();
        if (wants_snapshot(report.t_end))
          write_obj(sim.mesh(), snapshot_path(report.t_end));
      }
    }
  } catch (...) {
    if (steps_csv.is_open()) steps_csv.flush();
    throw;
  }
  result.steps_taken = static_cast<int>(result.steps.size());
  result.ledger = sim.ledger();

  if (config.mesh_path.empty())
    result.error = radial_error(sim.mesh(), config.center, config.radius);

  if (!out_dir.empty()) {
    if (result.error) {
      std::ofstream err_csv(out_dir + "/errors.csv");
      err_csv << "field,h,h_L,Cr,T,steps,markers,e1,eg\n";
      err_csv << config.field << ',' << format_g17(h) << ','
              << format_g17(result.h_max) << ',' << format_g17(config.courant)
              << ',' << format_g17(config.period) << ',' << result.steps_taken
              << ',' << result.error->markers << ','
              << format_g17(result.error->e1) << ','
              << format_g17(result.error->eg) << '\n';
    }
    write_ledger(result.ledger, out_dir);
  }
  return result;
}

BenchmarkResult run_benchmark(const RunConfig& config) {
  BenchmarkResult result;
  for (double h : config.grid_sizes) {
    std::string dir = config.out_dir;
    if (config.grid_sizes.size() > 1)
      dir += "/h_" + format_g17(h);
    result.grids.push_back(run_single_grid(config, h, dir));
  }

  if (result.grids.size() >= 2 && result.grids.front().error) {
    std::vector<std::pair<double, double>> pairs;
    for (const auto& g : result.grids)
      pairs.emplace_back(g.h, g.error ? g.error->e1 : 0.0);
    const auto orders = convergence_orders(pairs);
    if (orders) result.e1_orders = *orders;

    fs::create_directories(config.out_dir);
    std::ofstream conv(config.out_dir + "/convergence.csv");
    conv << "h,e1,order\n";
    for (std::size_t i = 0; i < result.grids.size(); ++i) {
      conv << format_g17(result.grids[i].h) << ','
           << format_g17(result.grids[i].error->e1) << ',';
      if (i > 0 && i - 1 < result.e1_orders.size() &&
          result.e1_orders[i - 1])
        conv << format_g17(*result.e1_orders[i - 1]);
      conv << '\n';
    }
  }
  return result;
}

}  // namespace mars
