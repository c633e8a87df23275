#include "pafnet/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numbers>
#include <random>

#include <json.hpp>

#include "pafnet/checkpoint.hpp"
#include "pafnet/errors.hpp"
#include "pafnet/optim.hpp"
#include "pafnet/reference.hpp"

namespace pafnet {

using ad::Expr;
using ad::Graph;

namespace {

std::vector<std::pair<double, double>> ordered_ranges(
    const std::map<std::string, std::pair<double, double>>& by_name,
    const std::vector<std::string>& vars, const std::string& ctx) {
  if (by_name.size() != vars.size())
    throw ConfigError(ctx + " must cover exactly the problem variables");
  std::vector<std::pair<double, double>> out;
  for (const auto& v : vars) {
    auto it = by_name.find(v);
    if (it == by_name.end()) throw ConfigError(ctx + " is missing variable '" + v + "'");
    out.push_back(it->second);
  }
  return out;
}

double range_max_t(const ExperimentConfig& cfg) {
  double hi = 0.0;
  for (const auto* ranges :
       {&cfg.dataset.data_ranges, &cfg.dataset.physics_ranges, &cfg.dataset.test_ranges})
    if (auto it = ranges->find("t"); it != ranges->end())
      hi = std::max(hi, it->second.second);
  return hi;
}

struct OracleBundle {
  TruthFn truth;
  std::vector<std::pair<double, double>> domain;
  std::shared_ptr<Field1D> field1;  // diffusion problems
  std::shared_ptr<Field2D> field2;  // laplace
};

OracleBundle make_oracle(const ExperimentConfig& cfg, const PdeProblem& problem) {
  OracleBundle o;
  const auto& meta = problem.meta;
  if (problem.name == "oscillator") {
    const double m = meta.at("m"), mu = meta.at("mu"), k = meta.at("k");
    analytic_oscillator(0.0, m, mu, k);  // validates the underdamped regime
    o.truth = [m, mu, k](std::span<const double> p) {
      return analytic_oscillator(p[0], m, mu, k);
    };
    o.domain = {{0.0, 1e9}};
    return o;
  }
  if (problem.name == "advection_dispersion") {
    const double C0 = meta.at("C0"), v = meta.at("v"), D = meta.at("D");
    o.truth = [C0, v, D](std::span<const double> p) {
      return analytic_advection_dispersion(p[0], p[1], C0, v, D);
    };
    o.domain = {{0.0, meta.at("x_far")}, {0.0, 1e9}};
    return o;
  }
  if (problem.name == "diffusion_hetx" || problem.name == "diffusion_hetxt" ||
      problem.name == "diffusion_inverse") {
    DiffusivityFn D;
    if (problem.name == "diffusion_hetx") {
      D = [](double x, double) { return 0.02 * (0.3 * x + std::log(x * x + 1.5)); };
    } else if (problem.name == "diffusion_hetxt") {
      D = [](double x, double t) {
        const double a = x + std::sin(0.5 * t);
        return 0.02 * std::exp(-a * a);
      };
    } else {
      const double l1 = meta.at("lambda1_true"), l2 = meta.at("lambda2_true");
      D = [l1, l2](double x, double) { return 0.01 * (l1 * x * x + l2); };
    }
    ProfileFn ic = [](double x) {
      const double q = 1.0 / (x * x + 0.2);
      return 0.2 * q * q;
    };
    const double T =
        std::ceil(range_max_t(cfg) / cfg.dataset.oracle_save_interval) *
        cfg.dataset.oracle_save_interval;
    const int nx = cfg.dataset.oracle_nx;
    const double dt = stable_diffusion_dt(D, -1.0, 1.0, nx, T,
                                          cfg.dataset.oracle_save_interval);
    const int stride = static_cast<int>(
        std::llround(cfg.dataset.oracle_save_interval / dt));
    o.field1 = std::make_shared<Field1D>(
        fd_diffusion_solve(D, ic, -1.0, 1.0, T, nx, dt, stride));
    auto f = o.field1;
    o.truth = [f](std::span<const double> p) { return f->interp(p[0], p[1]); };
    o.domain = {{-1.0, 1.0}, {0.0, T}};
    return o;
  }
  if (problem.name == "laplace_inverse") {
    o.field2 = std::make_shared<Field2D>(fd_laplace_solve(
        meta.at("lambda1_true"), meta.at("lambda2_true"), cfg.dataset.oracle_n));
    auto f = o.field2;
    o.truth = [f](std::span<const double> p) { return f->interp(p[0], p[1]); };
    constexpr double two_pi = 2.0 * std::numbers::pi;
    o.domain = {{0.0, two_pi}, {0.0, two_pi}};
    return o;
  }
  throw ConfigError("no oracle for problem '" + problem.name + "'");
}

// observed boundary points for the Laplace inverse study (truth from the
// boundary formulas with the true lambdas)
void append_laplace_boundary_data(Dataset& ds, const PdeProblem& problem, int n,
                                  std::uint64_t seed) {
  if (n <= 0) return;
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double l1 = problem.meta.at("lambda1_true");
  const double l2 = problem.meta.at("lambda2_true");
  std::mt19937_64 rng(seed ^ 0xb5297a4d3f8c2a17ull);
  for (int i = 0; i < n; ++i) {
    const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
    const double s = u * two_pi;
    double x, y, value;
    switch (i % 4) {
      case 0: x = 0.0;    y = s; value = 3.0 * y * std::sin(y + l1); break;
      case 1: x = two_pi; y = s; value = 3.0 * y * std::sin(y + l1); break;
      case 2: x = s; y = 0.0;    value = 3.0 * x * std::sin(x + l2); break;
      default: x = s; y = two_pi; value = 3.0 * x * std::sin(x + l2); break;
    }
    ds.data_points.push_back({x, y});
    ds.data_values.push_back(value);
  }
}

PointMatrix sample_condition_points(
    const ConditionTerm& term, const std::vector<std::string>& vars,
    const std::vector<std::pair<double, double>>& physics_ranges, int n,
    std::uint64_t seed) {
  std::vector<std::size_t> free_dims;
  for (std::size_t d = 0; d < vars.size(); ++d)
    if (!term.pinned.count(vars[d])) free_dims.push_back(d);

  std::vector<double> base(vars.size(), 0.0);
  for (std::size_t d = 0; d < vars.size(); ++d)
    if (auto it = term.pinned.find(vars[d]); it != term.pinned.end())
      base[d] = it->second;

  if (free_dims.empty()) return {base};

  std::vector<std::pair<double, double>> ranges;
  for (std::size_t d : free_dims) ranges.push_back(physics_ranges[d]);
  PointMatrix free_pts =
      sample_collocation(ranges, n, seed, SampleMode::UniformRandom);
  PointMatrix out;
  out.reserve(free_pts.size());
  for (const auto& fp : free_pts) {
    std::vector<double> pt = base;
    for (std::size_t k = 0; k < free_dims.size(); ++k) pt[free_dims[k]] = fp[k];
    out.push_back(std::move(pt));
  }
  return out;
}

struct Assembly {
  PdeProblem problem;
  NetworkSpec spec;
  Dataset ds;
  OracleBundle oracle;
  std::unique_ptr<Graph> graph;
  std::vector<Expr> params;
  std::vector<Expr> inputs;
  std::vector<ad::VarId> theta_ids;
  std::vector<ad::VarId> input_ids;
  Expr u;
  LossParts loss;
  Expr val_loss;
  bool has_val = false;
  std::unique_ptr<ad::Session> train_sess;
  std::unique_ptr<ad::Session> pred_sess;
  ParamStore layout;  // names/segments (values overwritten by training)
};

Assembly assemble(const ExperimentConfig& cfg) {
  Assembly a;
  a.problem = make_problem(cfg.problem, cfg.problem_params);
  a.spec = cfg.network;
  a.spec.physics_unknowns = a.problem.unknowns;
  a.spec.validate();
  if (a.spec.input_vars != a.problem.input_vars)
    throw ConfigError("network.inputs must match the problem variables");
  for (const auto& [name, u] : cfg.unknowns) {
    if (std::find(a.problem.unknowns.begin(), a.problem.unknowns.end(), name) ==
        a.problem.unknowns.end())
      throw ConfigError("problem '" + cfg.problem + "' has no unknown '" + name + "'");
  }

  // dataset
  a.oracle = make_oracle(cfg, a.problem);
  SplitSpec split;
  split.data_ranges =
      ordered_ranges(cfg.dataset.data_ranges, a.problem.input_vars, "data_ranges");
  split.physics_ranges = ordered_ranges(cfg.dataset.physics_ranges,
                                        a.problem.input_vars, "physics_ranges");
  if (!cfg.dataset.test_ranges.empty())
    split.test_ranges =
        ordered_ranges(cfg.dataset.test_ranges, a.problem.input_vars, "test_ranges");
  split.n_data = cfg.dataset.n_data;
  split.n_physics = cfg.dataset.n_physics;
  split.n_test = cfg.dataset.n_test;
  split.mode = cfg.dataset.mode;
  split.validation_fraction = cfg.dataset.validation_fraction;
  a.ds = make_dataset(a.problem.input_vars, a.oracle.truth, a.oracle.domain, split,
                      cfg.seed);
  if (cfg.problem == "laplace_inverse")
    append_laplace_boundary_data(a.ds, a.problem, cfg.dataset.n_boundary_data,
                                 cfg.seed);

  // expression graph: parameters first, then inputs
  a.graph = std::make_unique<Graph>();
  Graph& g = *a.graph;
  a.params = make_param_vars(a.spec, g);
  a.theta_ids.reserve(a.params.size());
  for (const Expr& p : a.params) a.theta_ids.push_back(g.var_id(p));
  for (const auto& name : a.problem.input_vars) {
    a.inputs.push_back(g.variable(name));
    a.input_ids.push_back(g.var_id(a.inputs.back()));
  }
  a.layout = init_params(a.spec, 0);

  a.u = forward(a.spec, g, a.params, a.inputs);
  std::span<const Expr> lambdas(a.params.data() + a.layout.lambda_offset,
                                a.layout.lambda_count);
  Expr pde_res = a.problem.residual(g, a.u, a.inputs, lambdas);

  auto make_terms = [&](const std::vector<ConditionTerm>& terms, int n,
                        std::uint64_t seed_base) {
    std::vector<TermBatch> out;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const ConditionTerm& term = terms[i];
      Expr lhs = term.deriv_var.empty()
                     ? a.u
                     : g.derive(a.u, a.inputs[std::distance(
                                    a.problem.input_vars.begin(),
                                    std::find(a.problem.input_vars.begin(),
                                              a.problem.input_vars.end(),
                                              term.deriv_var))]);
      Expr residual = lhs - term.target(g, a.inputs, lambdas);
      PointMatrix pts = sample_condition_points(
          term, a.problem.input_vars, split.physics_ranges, n, seed_base + i);
      out.push_back({residual, std::move(pts)});
    }
    return out;
  };
  std::vector<TermBatch> bc_terms =
      make_terms(a.problem.bc, cfg.dataset.n_bc, cfg.seed * 1000 + 100);
  std::vector<TermBatch> ic_terms =
      make_terms(a.problem.ic, cfg.dataset.n_ic, cfg.seed * 1000 + 200);

  a.loss = total_loss(g, a.u, a.inputs, a.ds.data_points, a.ds.data_values, pde_res,
                      a.ds.physics_points, bc_terms, ic_terms, cfg.weights);

  // validation MSE (early stopping)
  a.has_val = !a.ds.val_points.empty();
  if (a.has_val) {
    Expr sum = g.constant(0.0);
    for (std::size_t i = 0; i < a.ds.val_points.size(); ++i) {
      std::vector<std::pair<ad::VarId, double>> subs;
      for (std::size_t d = 0; d < a.input_ids.size(); ++d)
        subs.emplace_back(a.input_ids[d], a.ds.val_points[i][d]);
      Expr err = g.substitute(a.u, subs) - a.ds.val_values[i];
      sum = sum + err * err;
    }
    a.val_loss = sum / static_cast<double>(a.ds.val_points.size());
  } else {
    a.val_loss = g.constant(0.0);
  }

  std::vector<Expr> roots = {a.loss.total, a.loss.data, a.loss.pde,
                             a.loss.bc,    a.loss.ic,   a.val_loss};
  a.train_sess = std::make_unique<ad::Session>(g, roots);
  a.pred_sess = std::make_unique<ad::Session>(g, a.u);
  return a;
}

struct CsvWriter {
  std::ofstream os;
  explicit CsvWriter(const std::string& path) : os(path) {
    if (!os) throw IoError("cannot write " + path);
  }
  void number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  }
};

MetricsRecord finish(const ExperimentConfig& cfg, Assembly& a, ParamStore& store,
                     long epochs_run, bool early_stopped, bool write_outputs) {
  Graph& g = *a.graph;
  ad::Binding bind(g);
  for (std::size_t i = 0; i < a.theta_ids.size(); ++i)
    bind.set(a.theta_ids[i], store.values[i]);
  a.train_sess->forward(bind);

  MetricsRecord rec;
  rec.problem = cfg.problem;
  rec.seed = cfg.seed;
  rec.n_params = count_params(a.spec);
  rec.paf_fraction = a.spec.paf_fraction();
  rec.loss_total = a.train_sess->value(a.loss.total);
  rec.loss_data = a.train_sess->value(a.loss.data);
  rec.loss_pde = a.train_sess->value(a.loss.pde);
  rec.loss_bc = a.train_sess->value(a.loss.bc);
  rec.loss_ic = a.train_sess->value(a.loss.ic);
  rec.loss_physics = cfg.weights.pde * rec.loss_pde + cfg.weights.bc * rec.loss_bc +
                     cfg.weights.ic * rec.loss_ic;
  rec.epochs_run = epochs_run;
  rec.early_stopped = early_stopped;

  auto predict = [&](std::span<const double> pt) {
    for (std::size_t d = 0; d < a.input_ids.size(); ++d)
      bind.set(a.input_ids[d], pt[d]);
    a.pred_sess->forward(bind);
    return a.pred_sess->value(a.u);
  };

  std::vector<double> train_pred;
  for (const auto& pt : a.ds.data_points) train_pred.push_back(predict(pt));
  rec.r2_train = r_squared(train_pred, a.ds.data_values);

  std::vector<double> test_pred;
  for (const auto& pt : a.ds.test_points) test_pred.push_back(predict(pt));
  if (test_pred.size() >= 2) {
    rec.r2_test = r_squared(test_pred, a.ds.test_values);
    rec.has_test = true;
  }

  for (std::size_t i = 0; i < a.problem.unknowns.size(); ++i) {
    const std::string& name = a.problem.unknowns[i];
    ParameterEstimate est;
    est.estimate = store.values[store.lambda_offset + i];
    est.truth = a.problem.unknown_truth[i];
    if (auto it = cfg.unknowns.find(name); it != cfg.unknowns.end() && it->second.has_truth)
      est.truth = it->second.truth;
    est.are = are(est.estimate, est.truth);
    rec.lambdas[name] = est;
  }
  for (std::size_t i = 0; i < store.omega_count; ++i)
    rec.omegas[store.names[store.omega_offset + i]] =
        store.values[store.omega_offset + i];

  if (write_outputs) {
    namespace fs = std::filesystem;
    const fs::path dir = cfg.out_dir.empty() ? fs::path(".") : fs::path(cfg.out_dir);
    fs::create_directories(dir);
    write_dataset_csv(a.ds, (dir / "dataset.csv").string());
    save_checkpoint(store, a.spec, (dir / "checkpoint.bin").string());

    CsvWriter pred((dir / "predictions.csv").string());
    for (const auto& v : a.ds.vars) pred.os << v << ',';
    pred.os << "truth,prediction,role\n";
    auto rows = [&](const PointMatrix& pts, const std::vector<double>& truths,
                    const std::vector<double>& preds, Role role) {
      for (std::size_t i = 0; i < pts.size(); ++i) {
        for (double c : pts[i]) {
          pred.number(c);
          pred.os << ',';
        }
        pred.number(truths[i]);
        pred.os << ',';
        pred.number(preds[i]);
        pred.os << ',' << role_name(role) << '\n';
      }
    };
    rows(a.ds.data_points, a.ds.data_values, train_pred, Role::Data);
    std::vector<double> val_pred;
    for (const auto& pt : a.ds.val_points) val_pred.push_back(predict(pt));
    rows(a.ds.val_points, a.ds.val_values, val_pred, Role::Validation);
    rows(a.ds.test_points, a.ds.test_values, test_pred, Role::Test);
  }
  return rec;
}

}  // namespace

void write_metrics_json(const MetricsRecord& rec, const std::string& path) {
  nlohmann::ordered_json j;
  j["problem"] = rec.problem;
  j["seed"] = rec.seed;
  j["n_params"] = rec.n_params;
  j["paf_fraction"] = rec.paf_fraction;
  j["loss"] = {{"total", rec.loss_total}, {"data", rec.loss_data},
               {"pde", rec.loss_pde},     {"bc", rec.loss_bc},
               {"ic", rec.loss_ic},       {"physics", rec.loss_physics}};
  j["r2_train"] = rec.r2_train;
  if (rec.has_test)
    j["r2_test"] = rec.r2_test;
  else
    j["r2_test"] = nullptr;
  nlohmann::ordered_json lam = nlohmann::ordered_json::object();
  for (const auto& [name, est] : rec.lambdas)
    lam[name] = {{"estimate", est.estimate}, {"truth", est.truth}, {"are", est.are}};
  j["lambda"] = lam;
  nlohmann::ordered_json om = nlohmann::ordered_json::object();
  for (const auto& [name, v] : rec.omegas) om[name] = v;
  j["omega"] = om;
  j["epochs_run"] = rec.epochs_run;
  j["early_stopped"] = rec.early_stopped;
  j["wall_time_s"] = rec.wall_time_s;

  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  os << j.dump(2) << '\n';
}

MetricsRecord run_experiment(const ExperimentConfig& cfg, bool write_outputs) {
  const auto t_start = std::chrono::steady_clock::now();
  Assembly a = assemble(cfg);
  Graph& g = *a.graph;

  std::vector<double> lambda_init(a.problem.unknowns.size(), 1.0);
  for (std::size_t i = 0; i < a.problem.unknowns.size(); ++i)
    if (auto it = cfg.unknowns.find(a.problem.unknowns[i]); it != cfg.unknowns.end())
      lambda_init[i] = it->second.init;
  ParamStore store = init_params(a.spec, cfg.seed, lambda_init);
  for (const auto& [name, value] : cfg.init_overrides)
    store.values[store.index_of(name)] = value;

  ad::Binding bind(g);
  auto loss_grad = [&](std::span<const double> theta, std::span<double> grad) {
    for (std::size_t i = 0; i < a.theta_ids.size(); ++i)
      bind.set(a.theta_ids[i], theta[i]);
    a.train_sess->forward(bind);
    a.train_sess->backward(a.loss.total, a.theta_ids, grad);
    return a.train_sess->value(a.loss.total);
  };
  auto forward_only = [&](std::span<const double> theta) {
    for (std::size_t i = 0; i < a.theta_ids.size(); ++i)
      bind.set(a.theta_ids[i], theta[i]);
    a.train_sess->forward(bind);
  };

  namespace fs = std::filesystem;
  std::unique_ptr<CsvWriter> curve;
  if (write_outputs) {
    const fs::path dir = cfg.out_dir.empty() ? fs::path(".") : fs::path(cfg.out_dir);
    fs::create_directories(dir);
    curve = std::make_unique<CsvWriter>((dir / "loss_curve.csv").string());
    curve->os << "epoch,total_loss,data_loss,physics_loss";
    for (std::size_t i = 0; i < store.lambda_count; ++i)
      curve->os << ',' << store.names[store.lambda_offset + i];
    for (std::size_t i = 0; i < store.omega_count; ++i)
      curve->os << ',' << store.names[store.omega_offset + i];
    curve->os << '\n';
  }
  auto log_row = [&](long epoch) {
    if (!curve) return;
    const double pde = a.train_sess->value(a.loss.pde);
    const double bcv = a.train_sess->value(a.loss.bc);
    const double icv = a.train_sess->value(a.loss.ic);
    curve->os << epoch << ',';
    curve->number(a.train_sess->value(a.loss.total));
    curve->os << ',';
    curve->number(a.train_sess->value(a.loss.data));
    curve->os << ',';
    curve->number(cfg.weights.pde * pde + cfg.weights.bc * bcv + cfg.weights.ic * icv);
    for (std::size_t i = 0; i < store.lambda_count; ++i) {
      curve->os << ',';
      curve->number(store.values[store.lambda_offset + i]);
    }
    for (std::size_t i = 0; i < store.omega_count; ++i) {
      curve->os << ',';
      curve->number(store.values[store.omega_offset + i]);
    }
    curve->os << '\n';
  };

  // validation-based early stopping with best-parameter restore
  const long patience = cfg.optimizer.early_stop_patience;
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<double> best_theta;
  long since_best = 0;
  bool early_stopped = false;
  auto check_val = [&](std::span<const double> theta_now) {
    if (!a.has_val || patience <= 0) return false;
    const double v = a.train_sess->value(a.val_loss);
    if (v < best_val) {
      best_val = v;
      best_theta.assign(theta_now.begin(), theta_now.end());
      since_best = 0;
    } else if (++since_best >= patience) {
      return true;
    }
    return false;
  };

  const long adam_epochs = (cfg.optimizer.kind == "lbfgs") ? 0 : cfg.optimizer.epochs;
  const long lbfgs_epochs = (cfg.optimizer.kind == "lbfgs") ? cfg.optimizer.epochs
                            : (cfg.optimizer.kind == "adam_lbfgs")
                                ? cfg.optimizer.polish_epochs
                                : 0;
  long epochs_run = 0;

  if (adam_epochs > 0) {
    AdamState adam(store.size(), cfg.optimizer.schedule.lr_at(0, adam_epochs));
    std::vector<double> grad(store.size());
    for (long epoch = 0; epoch < adam_epochs; ++epoch) {
      adam.lr = cfg.optimizer.schedule.lr_at(epoch, adam_epochs);
      loss_grad(store.values, grad);  // session now holds this epoch's values
      log_row(epochs_run);
      ++epochs_run;
      if (check_val(store.values)) {
        early_stopped = true;
        break;
      }
      adam_step(adam, store.values, grad);
    }
  }

  if (!early_stopped && lbfgs_epochs > 0) {
    LbfgsState lb;
    lb.history = cfg.optimizer.history;
    lb.c1 = cfg.optimizer.c1;
    lb.c2 = cfg.optimizer.c2;
    lb.max_linesearch = cfg.optimizer.max_linesearch;
    for (long epoch = 0; epoch < lbfgs_epochs; ++epoch) {
      double loss;
      try {
        loss = lbfgs_step(lb, store.values, loss_grad);
      } catch (const LineSearchFailed&) {
        lb.pairs.clear();
        loss = steepest_descent_step(store.values, loss_grad);
      }
      // the session may hold a rejected trial point; refresh if so
      if (loss != a.train_sess->value(a.loss.total)) forward_only(store.values);
      log_row(epochs_run);
      ++epochs_run;
      if (check_val(store.values)) {
        early_stopped = true;
        break;
      }
    }
  }

  // keep the parameters from just before the validation error started rising
  if (a.has_val && !best_theta.empty()) store.values = best_theta;

  MetricsRecord rec = finish(cfg, a, store, epochs_run, early_stopped, write_outputs);
  rec.wall_time_s = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t_start)
                        .count();
  if (write_outputs) {
    const fs::path dir = cfg.out_dir.empty() ? fs::path(".") : fs::path(cfg.out_dir);
    write_metrics_json(rec, (dir / "metrics.json").string());
  }
  return rec;
}

MetricsRecord evaluate_checkpoint(const ExperimentConfig& cfg,
                                  const std::string& checkpoint_path,
                                  bool write_outputs) {
  const auto t_start = std::chrono::steady_clock::now();
  Assembly a = assemble(cfg);
  ParamStore store = load_checkpoint(a.spec, checkpoint_path);
  MetricsRecord rec = finish(cfg, a, store, 0, false, write_outputs);
  rec.wall_time_s = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t_start)
                        .count();
  if (write_outputs) {
    namespace fs = std::filesystem;
    const fs::path dir = cfg.out_dir.empty() ? fs::path(".") : fs::path(cfg.out_dir);
    fs::create_directories(dir);
    write_metrics_json(rec, (dir / "metrics.json").string());
  }
  return rec;
}

}  // namespace pafnet
