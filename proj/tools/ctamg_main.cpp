#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "ctamg/study.hpp"

namespace {

int cmd_mesh(const std::string& geometry, int level, const std::string& out) {
  const ctamg::Mesh mesh = ctamg::make_geometry(geometry, level);
  ctamg::write_mesh(mesh, out);
  std::cout << "wrote " << out << ": " << mesh.nodes.size() << " nodes, "
            << mesh.triangles.size() << " triangles, " << mesh.boundary_nodes.size()
            << " boundary nodes\n";
  return 0;
}

int cmd_assemble(const std::string& geometry, int level, const std::string& out_dir) {
  const ctamg::Mesh mesh = ctamg::make_geometry(geometry, level);
  const ctamg::AssembledProblem problem = ctamg::assemble(mesh, level);
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  ctamg::write_matrix_market(problem.stiffness, (dir / "stiffness.mtx").string());
  ctamg::write_matrix_market(problem.mass, (dir / "mass.mtx").string());
  std::ofstream coords(dir / "coords.txt");
  coords << problem.n_interior() << "\n";
  char buf[80];
  for (int i = 0; i < problem.n_interior(); ++i) {
    const ctamg::Point p = problem.interior_coord(i);
    std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", p.x, p.y);
    coords << buf;
  }
  std::cout << "assembled " << problem.n_interior() << " interior unknowns, stiffness nnz "
            << problem.stiffness.nnz() << "\n";
  if (problem.positive_offdiag_count > 0)
    std::cout << "warning: " << problem.positive_offdiag_count
              << " positive stiffness off-diagonals (max " << problem.max_positive_offdiag
              << ")\n";
  return 0;
}

int cmd_hierarchy(const std::string& matrix_path, const ctamg::CoarseningParams& params,
                  const std::string& out_dir) {
  const ctamg::SparseMatrix a = ctamg::read_matrix_market(matrix_path);
  const ctamg::Hierarchy h = ctamg::build_hierarchy(a, params);
  ctamg::write_hierarchy(h, out_dir);
  std::cout << "levels:";
  for (int d = 0; d < h.level_count(); ++d) std::cout << " " << h.size(d);
  std::cout << "\noperator complexity: " << ctamg::operator_complexity(h) << "\n";
  return 0;
}

int cmd_study(const ctamg::StudyConfig& cfg) {
  const ctamg::StudyResult result = ctamg::run_study(cfg, &std::cerr);
  ctamg::write_study_outputs(result, cfg);
  auto print = [](const char* name, const std::vector<ctamg::StudyRow>& rows) {
    if (rows.empty()) return;
    std::cout << name << ":\n  level,error,time\n";
    for (const ctamg::StudyRow& r : rows)
      std::cout << "  " << r.level << "," << r.error << "," << r.solve_time
                << (r.all_converged ? "" : "  [flagged]") << "\n";
  };
  print("combination technique", result.ct);
  print("full tensor product", result.full_tp);
  std::cout << "outputs in " << cfg.output_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse tensor-product elliptic solver on algebraic multilevel hierarchies"};
  app.require_subcommand(1);

  // mesh
  auto* mesh_cmd = app.add_subcommand("mesh", "generate a mesh file");
  std::string mesh_geometry = "square", mesh_out = "mesh.txt";
  int mesh_level = 3;
  mesh_cmd->add_option("--geometry", mesh_geometry, "square | disk | mesh:<path>");
  mesh_cmd->add_option("--level", mesh_level, "refinement level J");
  mesh_cmd->add_option("--out", mesh_out, "output path");

  // assemble
  auto* asm_cmd = app.add_subcommand("assemble", "assemble stiffness and mass matrices");
  std::string asm_geometry = "square", asm_out = "assembled";
  int asm_level = 3;
  asm_cmd->add_option("--geometry", asm_geometry, "square | disk | mesh:<path>");
  asm_cmd->add_option("--level", asm_level, "refinement level J");
  asm_cmd->add_option("--out", asm_out, "output directory");

  // hierarchy
  auto* hier_cmd = app.add_subcommand("hierarchy", "build and export an AMG hierarchy");
  std::string hier_matrix, hier_out = "hierarchy";
  ctamg::CoarseningParams params;
  hier_cmd->add_option("--matrix", hier_matrix, "Matrix Market input")->required();
  hier_cmd->add_option("--eps-str", params.eps_str, "strength measure");
  hier_cmd->add_option("--jacobi-passes", params.jacobi_passes, "Jacobi interpolation passes");
  hier_cmd->add_option("--truncation", params.truncation_threshold, "interpolation truncation");
  hier_cmd->add_option("--min-coarse-size", params.min_coarse_size, "coarsest level size");
  hier_cmd->add_option("--max-levels", params.max_levels, "maximum number of levels");
  hier_cmd->add_option("--out", hier_out, "output directory");

  // study
  auto* study_cmd = app.add_subcommand("study", "run a convergence study");
  ctamg::StudyConfig cfg;
  std::string levels_text = "3..5", rhs_text = "constant", mode_text = "ct";
  study_cmd->set_config("--config", "", "key = value configuration file");
  study_cmd->add_option("--geometry", cfg.geometry, "square | disk | mesh:<path>");
  study_cmd->add_option("--levels", levels_text, "level range, e.g. 3..6");
  study_cmd->add_option("--rhs", rhs_text, "constant | gaussian")
      ->check(CLI::IsMember({"constant", "gaussian"}));
  study_cmd->add_option("--corr-length", cfg.corr_length, "Gaussian kernel correlation length");
  study_cmd->add_option("--eps-str", cfg.eps_str, "strength measure");
  study_cmd->add_option("--jacobi-passes", cfg.jacobi_passes, "Jacobi interpolation passes");
  study_cmd->add_option("--truncation", cfg.truncation, "interpolation truncation");
  study_cmd->add_option("--tol", cfg.tol, "subproblem solver tolerance");
  study_cmd->add_option("--n-eval", cfg.n_eval, "number of sampled fine node pairs");
  study_cmd->add_option("--seed", cfg.seed, "sampling seed");
  study_cmd->add_option("--mode", mode_text, "ct | full_tp | both")
      ->check(CLI::IsMember({"ct", "full_tp", "both"}));
  study_cmd->add_option("--jobs", cfg.jobs, "concurrent subproblem solves");
  study_cmd->add_option("--out", cfg.output_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (app.got_subcommand(mesh_cmd)) return cmd_mesh(mesh_geometry, mesh_level, mesh_out);
    if (app.got_subcommand(asm_cmd)) return cmd_assemble(asm_geometry, asm_level, asm_out);
    if (app.got_subcommand(hier_cmd)) return cmd_hierarchy(hier_matrix, params, hier_out);
    cfg.levels = ctamg::parse_level_range(levels_text);
    cfg.rhs = rhs_text == "gaussian" ? ctamg::RhsKind::kGaussian : ctamg::RhsKind::kConstant;
    cfg.mode = mode_text == "full_tp"
                   ? ctamg::StudyMode::kFullTp
                   : (mode_text == "both" ? ctamg::StudyMode::kBoth : ctamg::StudyMode::kCt);
    return cmd_study(cfg);
  } catch (const ctamg::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const ctamg::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
