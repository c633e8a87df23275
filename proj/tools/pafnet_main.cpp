#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <glob.h>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "pafnet/config.hpp"
#include "pafnet/errors.hpp"
#include "pafnet/experiment.hpp"
#include "pafnet/reference.hpp"

namespace fs = std::filesystem;

namespace {

struct Overrides {
  std::int64_t seed = -1;
  std::string out_dir;
  std::int64_t epochs = -1;
};

pafnet::ExperimentConfig load_with_overrides(const std::string& path,
                                             const Overrides& ov) {
  pafnet::ExperimentConfig cfg = pafnet::load_config(path);
  if (ov.seed >= 0) cfg.seed = static_cast<std::uint64_t>(ov.seed);
  if (!ov.out_dir.empty()) cfg.out_dir = ov.out_dir;
  if (ov.epochs >= 0) cfg.optimizer.epochs = ov.epochs;
  if (cfg.out_dir.empty())
    cfg.out_dir = "runs/" + cfg.name + "_seed" + std::to_string(cfg.seed);
  return cfg;
}

void print_summary(const pafnet::MetricsRecord& rec, const std::string& out_dir) {
  std::printf("problem=%s seed=%llu params=%zu paf_fraction=%.3f\n",
              rec.problem.c_str(), static_cast<unsigned long long>(rec.seed),
              rec.n_params, rec.paf_fraction);
  std::printf("loss: total=%.6g data=%.6g physics=%.6g\n", rec.loss_total,
              rec.loss_data, rec.loss_physics);
  if (rec.has_test)
    std::printf("r2: train=%.4f test=%.4f\n", rec.r2_train, rec.r2_test);
  else
    std::printf("r2: train=%.4f\n", rec.r2_train);
  for (const auto& [name, est] : rec.lambdas)
    std::printf("%s: estimate=%.6g truth=%.6g are=%.4f\n", name.c_str(),
                est.estimate, est.truth, est.are);
  std::printf("epochs=%ld%s wall=%.1fs -> %s\n", rec.epochs_run,
              rec.early_stopped ? " (early stop)" : "", rec.wall_time_s,
              out_dir.c_str());
}

int cmd_train(const std::string& config_path, const Overrides& ov) {
  pafnet::ExperimentConfig cfg = load_with_overrides(config_path, ov);
  pafnet::MetricsRecord rec = pafnet::run_experiment(cfg);
  print_summary(rec, cfg.out_dir);
  return 0;
}

int cmd_evaluate(const std::string& checkpoint, const std::string& config_path,
                 const Overrides& ov) {
  pafnet::ExperimentConfig cfg = load_with_overrides(config_path, ov);
  pafnet::MetricsRecord rec = pafnet::evaluate_checkpoint(cfg, checkpoint);
  print_summary(rec, cfg.out_dir);
  return 0;
}

int cmd_oracle(const std::string& problem, const std::string& out_path) {
  using namespace pafnet;
  const std::string path =
      out_path.empty() ? problem + "_field.csv" : out_path;
  if (problem == "oscillator") {
    PdeProblem p = make_problem(problem);
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path);
    os.precision(12);
    os << "t,x\n";
    for (int i = 0; i <= 500; ++i) {
      const double t = 2.5 * i / 500.0;
      os << t << ','
         << analytic_oscillator(t, p.meta.at("m"), p.meta.at("mu"), p.meta.at("k"))
         << '\n';
    }
  } else if (problem == "advection_dispersion") {
    PdeProblem p = make_problem(problem);
    Field1D f;
    f.problem = problem;
    for (int i = 0; i <= 80; ++i) f.x.push_back(2.0 * i / 80.0);
    for (int j = 0; j <= 100; ++j) f.t.push_back(3.0 * (j + 1));
    for (double t : f.t) {
      std::vector<double> row;
      for (double x : f.x)
        row.push_back(analytic_advection_dispersion(x, t, p.meta.at("C0"),
                                                    p.meta.at("v"), p.meta.at("D")));
      f.values.push_back(std::move(row));
    }
    write_field_csv(f, path);
  } else if (problem == "diffusion_hetx" || problem == "diffusion_hetxt" ||
             problem == "diffusion_inverse") {
    DiffusivityFn D;
    if (problem == "diffusion_hetx")
      D = [](double x, double) { return 0.02 * (0.3 * x + std::log(x * x + 1.5)); };
    else if (problem == "diffusion_hetxt")
      D = [](double x, double t) {
        const double a = x + std::sin(0.5 * t);
        return 0.02 * std::exp(-a * a);
      };
    else
      D = [](double x, double) { return 0.01 * (0.30 * x * x + 0.30); };
    ProfileFn ic = [](double x) {
      const double q = 1.0 / (x * x + 0.2);
      return 0.2 * q * q;
    };
    const double dt = stable_diffusion_dt(D, -1.0, 1.0, 21, 30.0, 1.0);
    const int stride = static_cast<int>(std::llround(1.0 / dt));
    write_field_csv(fd_diffusion_solve(D, ic, -1.0, 1.0, 30.0, 21, dt, stride), path);
  } else if (problem == "laplace_inverse") {
    PdeProblem p = make_problem(problem);
    write_field_csv(
        fd_laplace_solve(p.meta.at("lambda1_true"), p.meta.at("lambda2_true"), 65),
        path);
  } else {
    throw ConfigError("unknown problem '" + problem + "'");
  }
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

int cmd_sweep(const std::vector<std::string>& patterns, int jobs,
              const Overrides& ov) {
  std::vector<std::string> paths;
  for (const std::string& pattern : patterns) {
    glob_t gl{};
    if (glob(pattern.c_str(), 0, nullptr, &gl) == 0) {
      for (std::size_t i = 0; i < gl.gl_pathc; ++i) paths.emplace_back(gl.gl_pathv[i]);
    }
    globfree(&gl);
  }
  if (paths.empty()) {
    std::fprintf(stderr, "sweep: no configs match\n");
    return 1;
  }
  std::sort(paths.begin(), paths.end());

  std::atomic<std::size_t> next{0};
  std::atomic<int> failures{0};
  std::mutex io;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= paths.size()) return;
      try {
        pafnet::ExperimentConfig cfg = load_with_overrides(paths[i], ov);
        pafnet::MetricsRecord rec = pafnet::run_experiment(cfg);
        std::lock_guard<std::mutex> lk(io);
        std::printf("[ok] %s: loss=%.6g r2_train=%.4f%s\n", cfg.name.c_str(),
                    rec.loss_total, rec.r2_train,
                    rec.has_test
                        ? (" r2_test=" + std::to_string(rec.r2_test)).c_str()
                        : "");
      } catch (const std::exception& e) {
        ++failures;
        std::lock_guard<std::mutex> lk(io);
        std::fprintf(stderr, "[fail] %s: %s\n", paths[i].c_str(), e.what());
      }
    }
  };
  const int n_threads = std::max(1, jobs);
  std::vector<std::thread> pool;
  for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return failures.load() == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"physics-informed networks with per-neuron physical activations"};
  app.require_subcommand(1);

  Overrides ov;
  std::string config_path, checkpoint_path, problem, out_path;
  std::vector<std::string> patterns;
  int jobs = 1;

  CLI::App* train = app.add_subcommand("train", "train a network from a config");
  train->add_option("--config", config_path, "config file")->required();
  train->add_option("--seed", ov.seed, "override the config seed");
  train->add_option("--out-dir", ov.out_dir, "output directory");
  train->add_option("--epochs", ov.epochs, "override the epoch budget");

  CLI::App* eval = app.add_subcommand("evaluate", "evaluate a checkpoint");
  eval->add_option("checkpoint", checkpoint_path, "checkpoint file")->required();
  eval->add_option("--config", config_path, "config file")->required();
  eval->add_option("--seed", ov.seed, "override the config seed");
  eval->add_option("--out-dir", ov.out_dir, "output directory");

  CLI::App* oracle = app.add_subcommand("oracle", "dump a ground-truth field");
  oracle->add_option("problem", problem, "problem name")->required();
  oracle->add_option("--out", out_path, "output csv path");

  CLI::App* sweep = app.add_subcommand("sweep", "run every config matching a glob");
  sweep->add_option("configs", patterns, "config globs")->required();
  sweep->add_option("--jobs", jobs, "parallel workers");
  sweep->add_option("--out-dir", ov.out_dir, "output directory prefix (per run)");
  sweep->add_option("--epochs", ov.epochs, "override the epoch budget");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(config_path, ov);
    if (eval->parsed()) return cmd_evaluate(checkpoint_path, config_path, ov);
    if (oracle->parsed()) return cmd_oracle(problem, out_path);
    if (sweep->parsed()) return cmd_sweep(patterns, jobs, ov);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
