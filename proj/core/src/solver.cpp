#include "ietidp/solver.hpp"

#include "ietidp/error.hpp"
#include "ietidp/parallel.hpp"

#include <json.hpp>

#include <chrono>
#include <optional>
#include <random>

namespace ietidp {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::string to_json(const SolveReport& r) {
  nlohmann::json j;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["kappa"] = r.kappa;
  j["kappa_solve"] = r.kappa_solve;
  j["probe_iterations"] = r.probe_iterations;
  j["lambda_min"] = r.lambda_min;
  j["lambda_max"] = r.lambda_max;
  j["max_jump"] = r.max_jump;
  j["dofs"] = r.num_dofs;
  j["multipliers"] = r.num_multipliers;
  j["coarse"] = r.coarse_size;
  j["residuals"] = r.residuals;
  j["timings"] = {{"assembly", r.timings.assembly},
                  {"setup", r.timings.setup},
                  {"solve", r.timings.solve},
                  {"recovery", r.timings.recovery}};
  return j.dump();
}

IetiSolver::IetiSolver(const MultiPatch& mp, const SourceFunction& f, const SolverOptions& options)
    : mp_(&mp), options_(options) {
  const int np = mp.num_patches();
  auto t0 = std::chrono::steady_clock::now();
  systems_.resize(np);
  parallel_for(np, options_.threads,
               [&](int k) { systems_[k] = assemble_local(mp, k, f, options_.assembly); });
  setup_times_.assembly = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  std::vector<std::optional<LocalSchur>> schurs(np);
  parallel_for(np, options_.threads, [&](int k) { schurs[k].emplace(systems_[k], k); });
  schurs_.reserve(np);
  for (auto& s : schurs) schurs_.push_back(std::move(*s));

  std::vector<ExtendedSpaceIndex> index;
  for (const LocalSystem& s : systems_) index.push_back(s.index);
  table_ = classify_dofs(mp, index, options_.primal);
  operators_ = std::make_unique<IetiOperators>(systems_, schurs_, table_, options_.threads);
  setup_times_.setup = seconds_since(t0);
}

SolveReport IetiSolver::solve() const {
  const IetiOperators& ops = *operators_;
  SolveReport rep;
  rep.timings = setup_times_;
  rep.num_multipliers = ops.num_multipliers();
  rep.coarse_size = ops.coarse_size();
  for (const LocalSystem& s : systems_) rep.num_dofs += s.index.num_own();

  auto t0 = std::chrono::steady_clock::now();
  const Eigen::VectorXd d = ops.compute_d();
  const LinearOperator apply_f = [&](const Eigen::VectorXd& x) { return ops.apply_F(x); };
  const LinearOperator apply_m = [&](const Eigen::VectorXd& x) { return ops.apply_MsD(x); };
  PcgResult pcg = solve_pcg(apply_f, apply_m, d, options_.rtol, options_.maxit);
  rep.timings.solve = seconds_since(t0);
  rep.lambda = std::move(pcg.x);
  rep.iterations = pcg.iterations;
  rep.converged = pcg.converged;
  rep.kappa = rep.kappa_solve = pcg.kappa;
  rep.lambda_min = pcg.lambda_min;
  rep.lambda_max = pcg.lambda_max;
  rep.residuals = std::move(pcg.residuals);
  if (options_.kappa_probe && d.size() > 0) {
    std::mt19937_64 rng(options_.probe_seed);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    Eigen::VectorXd b(d.size());
    for (double& v : b) v = uniform(rng);
    const PcgResult probe = solve_pcg(apply_f, apply_m, b, options_.rtol, options_.maxit);
    rep.kappa = probe.kappa;
    rep.lambda_min = probe.lambda_min;
    rep.lambda_max = probe.lambda_max;
    rep.probe_iterations = probe.iterations;
  }

  t0 = std::chrono::steady_clock::now();
  const PatchVectors w = ops.skeleton_solution(rep.lambda);
  const Eigen::VectorXd jump = ops.apply_B(w);
  rep.max_jump = jump.size() ? jump.cwiseAbs().maxCoeff() : 0.0;
  const int np = mp_->num_patches();
  rep.extended.resize(np);
  rep.coefficients.resize(np);
  parallel_for(np, options_.threads, [&](int k) {
    const ExtendedSpaceIndex& idx = systems_[k].index;
    Eigen::VectorXd e(idx.size());
    e.head(idx.num_interior) = schurs_[k].interior_solve(w[k]);
    e.tail(idx.num_skeleton()) = w[k];
    Eigen::VectorXd c = Eigen::VectorXd::Zero(mp_->space(k).size());
    for (int i = 0; i < idx.num_own(); ++i) c(idx.own_basis[i]) = e(i);
    rep.extended[k] = std::move(e);
    rep.coefficients[k] = std::move(c);
  });
  rep.timings.recovery = seconds_since(t0);
  return rep;
}

}  // namespace ietidp
