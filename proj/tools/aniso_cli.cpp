// Command-line driver: adaptation studies, plot data and mesh inspection.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "aniso/harness.hpp"
#include "aniso/mesh_io.hpp"

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

aniso::Polygon domain_by_name(const std::string& name) {
  if (name == "lshape") return aniso::lshape_domain();
  if (name == "unit-square") return aniso::unit_square_domain();
  throw CLI::ValidationError("--domain", "unknown domain '" + name + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anisotropic adaptive P1 finite elements for Dirichlet Poisson problems"};
  app.require_subcommand(1);

  // study
  auto* study = app.add_subcommand("study", "run a convergence or conditioning study");
  std::string kind;
  std::string modes = "uniform,isotropic,anisotropic";
  std::string targets = "500,1000,2000,4000,8000,16000,32000";
  aniso::StudyOptions opt;
  std::string out_dir = "results";
  bool no_timing = false;
  study->add_option("kind", kind, "convergence or conditioning")
      ->required()
      ->check(CLI::IsMember({"convergence", "conditioning"}));
  study->add_option("--modes", modes, "comma-separated adaptation modes")->capture_default_str();
  study->add_option("--targets", targets, "comma-separated target element counts")->capture_default_str();
  study->add_option("--problem", opt.problem, "test problem name")->capture_default_str();
  study->add_option("--quad-degree", opt.quad_degree, "quadrature degree (2..10)")
      ->check(CLI::Range(aniso::kMinQuadDegree, aniso::kMaxQuadDegree))
      ->capture_default_str();
  study->add_option("--gs-tol", opt.gs_tol, "Gauss-Seidel relative change tolerance")->capture_default_str();
  study->add_option("--gs-max-sweeps", opt.gs_max_sweeps, "Gauss-Seidel sweep cap")->capture_default_str();
  study->add_option("--seed", opt.seed, "Lanczos start-vector seed")->capture_default_str();
  study->add_option("--out", out_dir, "output directory")->capture_default_str();
  study->add_option("--debug-meshes", opt.debug_dir, "write every intermediate mesh to this directory");
  study->add_flag("--no-timing", no_timing, "write wall_time = 0 so reruns are byte-identical");

  // plot
  auto* plot = app.add_subcommand("plot", "derive gnuplot data files from a study CSV");
  std::string csv_path;
  std::string plot_dir = "plots";
  plot->add_option("csv", csv_path, "study CSV")->required()->check(CLI::ExistingFile);
  plot->add_option("--out", plot_dir, "output directory")->capture_default_str();

  // mesh show
  auto* mesh = app.add_subcommand("mesh", "mesh utilities");
  mesh->require_subcommand(1);
  auto* show = mesh->add_subcommand("show", "print the validation report and max aspect ratio");
  std::string mesh_path;
  std::string domain = "lshape";
  show->add_option("file", mesh_path, "mesh file")->required()->check(CLI::ExistingFile);
  show->add_option("--domain", domain, "lshape or unit-square")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*study) {
      opt.modes.clear();
      for (const auto& m : split_list(modes)) opt.modes.push_back(aniso::parse_mode(m));
      opt.targets.clear();
      for (const auto& t : split_list(targets)) opt.targets.push_back(std::stoi(t));
      opt.record_timing = !no_timing;
      const std::filesystem::path dir(out_dir);
      const auto csv = dir / (kind + ".csv");
      const auto records =
          kind == "convergence" ? aniso::run_convergence_study(opt, csv) : aniso::run_conditioning_study(opt, csv);
      aniso::emit_plot_data(records, dir);
      int failed = 0;
      for (const auto& r : records)
        if (!r.ok()) {
          ++failed;
          std::cerr << "row " << r.mode << " " << r.N << " failed: " << r.error << '\n';
        }
      std::cout << "wrote " << csv.string() << " (" << records.size() << " rows, " << failed << " failed)\n";
      return failed == 0 ? 0 : 2;
    }
    if (*plot) {
      const auto files = aniso::emit_plot_data(std::filesystem::path(csv_path), plot_dir);
      std::cout << "wrote " << files.convergence.string() << " and " << files.conditioning.string() << '\n';
      return 0;
    }
    if (*show) {
      const aniso::Mesh m = aniso::load_mesh(mesh_path, domain_by_name(domain));
      const aniso::ValidationReport rep = aniso::validate(m);
      std::cout << "vertices " << m.num_vertices() << "\ntriangles " << m.num_triangles() << '\n';
      if (rep.ok()) {
        std::cout << "valid\n";
        std::cout << "max_aspect_ratio " << aniso::max_aspect_ratio(m) << '\n';
        return 0;
      }
      for (const auto& v : rep.violations) std::cout << aniso::to_string(v.kind) << ": " << v.message << '\n';
      return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
