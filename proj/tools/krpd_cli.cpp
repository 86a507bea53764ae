// krpd: command-line front end.
//
//   krpd generate   --kind moons --seed 3 --out moons.csv
//   krpd fit-score  --detector krpd --train train.csv --query query.csv --out scores.csv
//   krpd grid       --detector rpd --train toy.csv --resolution 200 --out grid.csv
//   krpd benchmark  --datasets data/ --out table.csv
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
// Every subcommand also accepts --config FILE (TOML/INI with the same keys as the flags).

#include "krpd/datasets.hpp"
#include "krpd/detector.hpp"
#include "krpd/eval.hpp"
#include "krpd/report.hpp"
#include "krpd/serialize.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DetectorFlags {
  std::string detector = "krpd";
  double gamma = 0.25;
  long size = 100;
  long directions = 1000;
  std::uint64_t seed = 0;
  std::string solver = "tridiagonal";
  std::string label_column = "label";
};

void add_detector_flags(CLI::App* cmd, DetectorFlags& f) {
  cmd->add_option("--detector", f.detector, "rpd | krpd | krpd-rff | kpca | knn")
      ->check(CLI::IsMember({"rpd", "krpd", "krpd-rff", "kpca", "knn"}))
      ->capture_default_str();
  cmd->add_option("--gamma", f.gamma, "RBF kernel parameter")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--components,-M", f.size, "KPCA components M (krpd, kpca), RFF features D (krpd-rff) or k (knn)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--directions,-L", f.directions, "number of random projection directions")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--seed", f.seed, "direction / feature-map seed")->capture_default_str();
  cmd->add_option("--solver", f.solver, "eigensolver: tridiagonal | jacobi")
      ->check(CLI::IsMember({"tridiagonal", "jacobi"}))
      ->capture_default_str();
  cmd->add_option("--label-column", f.label_column, "name of the optional label column")->capture_default_str();
}

krpd::EigenSolver solver_of(const std::string& s) {
  return s == "jacobi" ? krpd::EigenSolver::Jacobi : krpd::EigenSolver::Tridiagonal;
}

bool has_column(const fs::path& path, const std::string& name) {
  std::ifstream in(path);
  std::string header;
  if (!in || !std::getline(in, header)) return false;
  for (const auto& h : krpd::detail::split_csv_line(header)) {
    if (krpd::detail::trim(h) == name) return true;
  }
  return false;
}

krpd::DataCloud load_maybe_labelled(const fs::path& path, const std::string& label_column) {
  if (has_column(path, label_column)) return krpd::load_csv(path, label_column);
  return krpd::load_csv(path);
}

krpd::Detector fit_from_flags(const DetectorFlags& f, const krpd::DataCloud& train) {
  const auto kind = *krpd::parse_detector_kind(f.detector);
  krpd::HyperParams p{f.gamma, f.size, f.directions};
  auto det = krpd::fit_detector(kind, p, train.features(), f.seed, solver_of(f.solver));
  const krpd::KpcaModel* kpca = std::get_if<krpd::KpcaModel>(&det.model());
  if (const auto* s = std::get_if<krpd::DepthScorer>(&det.model())) kpca = s->kpca();
  if (kpca && kpca->capped()) {
    std::cerr << "warning: requested " << f.size << " components, usable rank gives " << kpca->n_components() << "\n";
  }
  return det;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw krpd::DataError("cannot write " + path.string());
  return out;
}

// ---------------------------------------------------------------------------

int cmd_generate(const std::string& kind_name, std::uint64_t seed, const fs::path& out) {
  const auto kind = krpd::parse_toy_kind(kind_name);
  if (!kind) throw UsageError("unknown kind '" + kind_name + "' (expected unimodal, multimodal, cross or moons)");
  krpd::save_csv(krpd::generate_toy(*kind, seed), out);
  return kOk;
}

struct FitScoreArgs {
  DetectorFlags det;
  std::string train;
  std::string model;
  std::string save_model;
  std::string query;
  std::string out;
};

int cmd_fit_score(const FitScoreArgs& a) {
  if (a.train.empty() == a.model.empty()) throw UsageError("give exactly one of --train or --model");
  const krpd::Detector det = a.model.empty() ? fit_from_flags(a.det, load_maybe_labelled(a.train, a.det.label_column))
                                             : krpd::load_detector(a.model);
  if (!a.save_model.empty()) krpd::save_detector(det, a.save_model);

  const krpd::DataCloud query = load_maybe_labelled(a.query, a.det.label_column);
  const krpd::Vector scores = det.score(query.features());
  auto out = open_out(a.out);
  out << (query.has_labels() ? "score,label\n" : "score\n");
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    out << krpd::detail::format_double(scores(i));
    if (query.has_labels()) out << ',' << query.labels()[static_cast<std::size_t>(i)];
    out << '\n';
  }
  return kOk;
}

struct GridArgs {
  DetectorFlags det;
  std::string train;
  std::vector<double> bounds{-6.0, 6.0, -6.0, 6.0};
  int resolution = 200;
  double contamination = 0.25;
  std::string out;
};

int cmd_grid(const GridArgs& a) {
  if (a.bounds.size() != 4) throw UsageError("--bounds needs xmin,xmax,ymin,ymax");
  if (!(a.bounds[0] < a.bounds[1]) || !(a.bounds[2] < a.bounds[3])) throw UsageError("--bounds: min must be below max");
  if (a.resolution < 2) throw UsageError("--resolution must be at least 2");
  const krpd::DataCloud train = load_maybe_labelled(a.train, a.det.label_column);
  if (train.n_dims() != 2) {
    throw krpd::DataError("grid needs 2-D training data, got d=" + std::to_string(train.n_dims()));
  }
  const krpd::Detector det = fit_from_flags(a.det, train);

  const int r = a.resolution;
  krpd::RowMatrix grid(static_cast<Eigen::Index>(r) * r, 2);
  const double dx = (a.bounds[1] - a.bounds[0]) / (r - 1);
  const double dy = (a.bounds[3] - a.bounds[2]) / (r - 1);
  for (int iy = 0; iy < r; ++iy) {
    for (int ix = 0; ix < r; ++ix) {
      const Eigen::Index row = static_cast<Eigen::Index>(iy) * r + ix;
      grid(row, 0) = a.bounds[0] + ix * dx;
      grid(row, 1) = a.bounds[2] + iy * dy;
    }
  }
  const krpd::Vector scores = det.score(grid);
  const double threshold = krpd::percentile_threshold(det.score(train.features()), a.contamination);

  auto out = open_out(a.out);
  out << "x,y,score\n";
  for (Eigen::Index i = 0; i < grid.rows(); ++i) {
    out << krpd::detail::format_double(grid(i, 0)) << ',' << krpd::detail::format_double(grid(i, 1)) << ','
        << krpd::detail::format_double(scores(i)) << '\n';
  }
  out << "# threshold," << krpd::detail::format_double(threshold) << '\n';
  return kOk;
}

struct BenchmarkArgs {
  std::string datasets;
  std::string out;
  std::string report;
  std::vector<std::string> detectors{"rpd", "krpd", "krpd-rff", "kpca", "knn"};
  int trials = 5;
  std::uint64_t seed = 0;
  int budget = 25;
  long directions = 1000;
  int folds = 5;
  double train_fraction = 0.6;
  std::string solver = "tridiagonal";
  std::string label_column = "label";
  bool no_timing = false;
};

int cmd_benchmark(const BenchmarkArgs& a) {
  if (!fs::is_directory(a.datasets)) throw krpd::DataError("not a directory: " + a.datasets);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(a.datasets)) {
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw krpd::DataError("no .csv datasets in " + a.datasets);

  std::vector<krpd::NamedCloud> data;
  for (const auto& f : files) data.push_back({f.stem().string(), krpd::load_csv(f, a.label_column)});

  std::vector<krpd::DetectorKind> kinds;
  for (const auto& d : a.detectors) kinds.push_back(*krpd::parse_detector_kind(d));

  krpd::BenchmarkConfig cfg;
  cfg.trials = a.trials;
  cfg.seed = a.seed;
  cfg.train_fraction = a.train_fraction;
  cfg.space.budget = a.budget;
  cfg.space.directions = a.directions;
  cfg.space.folds = a.folds;
  cfg.space.solver = solver_of(a.solver);
  cfg.space.validate();

  const auto reports = krpd::run_benchmark(data, kinds, cfg);
  {
    auto out = open_out(a.out);
    krpd::write_benchmark_table(out, reports, !a.no_timing);
  }
  krpd::write_benchmark_text(std::cout, reports, a.trials, !a.no_timing);
  if (!a.report.empty()) {
    auto rep = open_out(a.report);
    krpd::write_benchmark_text(rep, reports, a.trials, !a.no_timing);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random projection depth and kernel random projection depth outlier detection"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read flags from a TOML/INI file");

  std::string gen_kind;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  auto* gen = app.add_subcommand("generate", "write a synthetic 2-D toy cloud (300 inliers, 100 outliers)");
  gen->add_option("--kind", gen_kind, "unimodal | multimodal | cross | moons")->required();
  gen->add_option("--seed", gen_seed)->capture_default_str();
  gen->add_option("--out", gen_out, "output CSV")->required();

  FitScoreArgs fs_args;
  auto* fit = app.add_subcommand("fit-score", "fit a detector and score a query CSV");
  add_detector_flags(fit, fs_args.det);
  fit->add_option("--train", fs_args.train, "training CSV (a label column, if present, is ignored)");
  fit->add_option("--model", fs_args.model, "load a saved model instead of fitting");
  fit->add_option("--save-model", fs_args.save_model, "write the fitted model as JSON");
  fit->add_option("--query", fs_args.query, "query CSV")->required();
  fit->add_option("--out", fs_args.out, "scores CSV (score[,label])")->required();

  GridArgs grid_args;
  auto* grid = app.add_subcommand("grid", "score a uniform 2-D grid for contour plots");
  add_detector_flags(grid, grid_args.det);
  grid->add_option("--train", grid_args.train, "2-D training CSV")->required();
  grid->add_option("--bounds", grid_args.bounds, "xmin,xmax,ymin,ymax")->delimiter(',')->expected(4)->capture_default_str();
  grid->add_option("--resolution", grid_args.resolution, "grid points per axis")->capture_default_str();
  grid->add_option("--contamination", grid_args.contamination, "outlier fraction for the threshold record")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  grid->add_option("--out", grid_args.out, "output CSV (x,y,score + threshold footer)")->required();

  BenchmarkArgs bench_args;
  auto* bench = app.add_subcommand("benchmark", "cross-validated ROC AUC benchmark over a directory of labelled CSVs");
  bench->add_option("--datasets", bench_args.datasets, "directory of labelled CSVs")->required();
  bench->add_option("--out", bench_args.out, "table CSV")->required();
  bench->add_option("--report", bench_args.report, "also write the text report to this file");
  bench->add_option("--detectors", bench_args.detectors, "subset of rpd,krpd,krpd-rff,kpca,knn")
      ->delimiter(',')
      ->check(CLI::IsMember({"rpd", "krpd", "krpd-rff", "kpca", "knn"}))
      ->capture_default_str();
  bench->add_option("--trials", bench_args.trials, "independent trials")->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--seed", bench_args.seed)->capture_default_str();
  bench->add_option("--budget", bench_args.budget, "random-search trials per detector")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench->add_option("--directions,-L", bench_args.directions)->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--folds", bench_args.folds)->check(CLI::Range(2, 100))->capture_default_str();
  bench->add_option("--train-fraction", bench_args.train_fraction)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  bench->add_option("--solver", bench_args.solver)->check(CLI::IsMember({"tridiagonal", "jacobi"}))->capture_default_str();
  bench->add_option("--label-column", bench_args.label_column)->capture_default_str();
  bench->add_flag("--no-timing", bench_args.no_timing, "write 0 for wall time so output is byte-reproducible");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) return cmd_generate(gen_kind, gen_seed, gen_out);
    if (*fit) return cmd_fit_score(fs_args);
    if (*grid) return cmd_grid(grid_args);
    if (*bench) return cmd_benchmark(bench_args);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const krpd::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  }
  return kUsage;
}
