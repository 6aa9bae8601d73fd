// Command-line front end: benchmark runs, static remeshing, convergence
// reports, and mesh validation.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mars/adjustments.hpp"
#include "mars/benchmark.hpp"
#include "mars/obj_io.hpp"

namespace {

struct RunFlags {
  std::string config_path;
  std::string field;
  std::string grid_sizes;
  std::string hl_rule;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

int cmd_run(const RunFlags& flags) {
  mars::RunConfig config;
  if (!flags.config_path.empty()) config = mars::load_config(flags.config_path);
  if (!flags.field.empty()) {
    // Field presets carry the matching sphere center.
    if (flags.field == "deformation")
      config.center = mars::default_deformation_config().center;
    config.field = flags.field;
  }
  if (!flags.grid_sizes.empty())
    mars::apply_config_line(config, "h", flags.grid_sizes);
  if (!flags.hl_rule.empty()) config.hl_rule = flags.hl_rule;
  if (!flags.out_dir.empty()) config.out_dir = flags.out_dir;
  if (flags.seed_set) config.seed = flags.seed;

  const mars::BenchmarkResult result = mars::run_benchmark(config);
  for (const auto& grid : result.grids) {
    std::cout << "h=" << mars::format_g17(grid.h)
              << " h_L=" << mars::format_g17(grid.h_max)
              << " steps=" << grid.steps_taken;
    if (grid.error)
      std::cout << " e1=" << mars::format_g17(grid.error->e1)
                << " eg=" << mars::format_g17(grid.error->eg);
    int irregular = 0;
    for (const auto& s : grid.steps)
      if (!s.regular) ++irregular;
    std::cout << " irregular_steps=" << irregular << '\n';
  }
  for (std::size_t i = 0; i < result.e1_orders.size(); ++i) {
    std::cout << "order[" << i << "]=";
    if (result.e1_orders[i])
      std::cout << mars::format_g17(*result.e1_orders[i]);
    else
      std::cout << "n/a";
    std::cout << '\n';
  }
  return 0;
}

int cmd_remesh(const std::string& in_path, const std::string& out_path,
               double h_max, double r_tiny, double theta,
               std::uint64_t seed) {
  mars::TriMesh mesh = mars::read_obj(in_path);
  if (h_max <= 0.0) {
    // Default interface scale: slightly above the current mean edge length.
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& e : mesh.edges()) {
      sum += mesh.edge_length(e);
      ++n;
    }
    h_max = 1.5 * sum / static_cast<double>(n);
  }

  mars::StepConfig config;
  config.regularity = mars::RegularityParams{r_tiny, h_max, theta};

  // Static analogue of one adjustment pass: split long edges in place,
  // collapse short ones, then run the cascade.
  for (const auto& e : mesh.edges()) {
    if (!mesh.has_edge(e)) continue;
    const double len = mesh.edge_length(e);
    if (len > h_max)
      mars::edge_split(mesh, e, static_cast<int>(std::ceil(len / h_max)));
  }
  mars::collapse_short_edges(mesh, config.regularity);
  mars::Rng rng(seed);
  const mars::CascadeOutcome outcome = mars::enforce_theta(mesh, config, rng);

  const mars::QualityReport quality =
      mars::check_regularity(mesh, config.regularity);
  std::cout << "flips=" << outcome.flips << " collapses=" << outcome.collapses
            << " vrem=" << outcome.relocations
            << " ltr=" << outcome.regenerations
            << " min_angle=" << mars::format_g17(quality.min_angle)
            << " regular=" << (quality.regular() ? 1 : 0) << '\n';
  mars::write_obj(mesh, out_path);
  return quality.regular() ? 0 : 2;
}

int cmd_report(const std::vector<std::string>& csv_paths) {
  std::vector<std::pair<double, double>> pairs;
  for (const auto& path : csv_paths) {
    std::ifstream in(path);
    if (!in) throw mars::MeshError("report: cannot open " + path);
    std::string header, row;
    if (!std::getline(in, header) || !std::getline(in, row))
      throw mars::MeshError("report: no data row in " + path);
    // errors.csv columns: field,h,h_L,Cr,T,steps,markers,e1,eg
    std::stringstream ss(row);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < 8)
      throw mars::MeshError("report: malformed row in " + path);
    pairs.emplace_back(std::stod(cells[1]), std::stod(cells[7]));
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& x, const auto& y) { return x.first > y.first; });
  const auto orders = mars::convergence_orders(pairs);
  if (!orders) throw mars::MeshError("report: grid sizes do not halve");
  std::cout << "h,e1,order\n";
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    std::cout << mars::format_g17(pairs[i].first) << ','
              << mars::format_g17(pairs[i].second) << ',';
    if (i > 0 && (*orders)[i - 1])
      std::cout << mars::format_g17(*(*orders)[i - 1]);
    std::cout << '\n';
  }
  return 0;
}

int cmd_validate(const std::string& in_path) {
  const mars::TriMesh mesh = mars::read_obj(in_path);
  std::cout << "vertices=" << mesh.vertex_count()
            << " edges=" << mesh.edge_count()
            << " triangles=" << mesh.triangle_count()
            << " euler=" << mesh.euler_characteristic() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lagrangian interface tracking on regular triangular meshes"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "run a benchmark configuration");
  run->add_option("--config", run_flags.config_path, "key=value config file");
  run->add_option("--field", run_flags.field, "vortical_shear or deformation");
  run->add_option("--h", run_flags.grid_sizes, "grid size(s), comma separated");
  run->add_option("--hL-rule", run_flags.hl_rule,
                  "interface scale rule, e.g. 0.5h or 6h^1.5");
  auto* seed_opt = run->add_option("--seed", run_flags.seed, "RNG seed");
  run->add_option("--out", run_flags.out_dir, "output directory");

  std::string in_path, out_path;
  double h_max = 0.0;
  double r_tiny = 0.1;
  double theta = mars::kPi / 10.0;
  std::uint64_t remesh_seed = 1;
  auto* remesh =
      app.add_subcommand("remesh", "apply the adjustment cascade to a mesh");
  remesh->add_option("--in", in_path, "input OBJ")->required();
  remesh->add_option("--out", out_path, "output OBJ")->required();
  remesh->add_option("--h-L", h_max, "maximum edge length");
  remesh->add_option("--r-tiny", r_tiny, "tiny-edge ratio");
  remesh->add_option("--theta", theta, "minimum interior angle (radians)");
  remesh->add_option("--seed", remesh_seed, "RNG seed");

  std::vector<std::string> csv_paths;
  auto* report =
      app.add_subcommand("report", "convergence orders from error CSVs");
  report->add_option("--csv", csv_paths, "errors.csv files, coarse to fine")
      ->required()
      ->expected(-2);

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "check an OBJ mesh");
  validate_cmd->add_option("--in", validate_path, "input OBJ")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      run_flags.seed_set = seed_opt->count() > 0;
      return cmd_run(run_flags);
    }
    if (*remesh)
      return cmd_remesh(in_path, out_path, h_max, r_tiny, theta, remesh_seed);
    if (*report) return cmd_report(csv_paths);
    if (*validate_cmd) return cmd_validate(validate_path);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
  return 0;
}
