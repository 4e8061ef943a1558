#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "irns/bench.hpp"
#include "irns/errors.hpp"
#include "irns/hinge.hpp"
#include "irns/rng.hpp"
#include "irns/slcp.hpp"

namespace irns {

namespace {

constexpr std::uint64_t kInstanceStream = 0xb53c;

std::vector<Algorithm> parse_algs(const std::string& alg) {
  if (alg == "irbfgs") return {Algorithm::kIrbfgs};
  if (alg == "hbfgs") return {Algorithm::kHbfgs};
  if (alg == "fbfgs") return {Algorithm::kFbfgs};
  if (alg == "all")
    return {Algorithm::kIrbfgs, Algorithm::kHbfgs, Algorithm::kFbfgs};
  throw ConfigError("unknown algorithm '" + alg + "'");
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{
      "Adaptive-sample-size nonsmooth BFGS benchmark runner.\n"
      "Emits per-run and aggregate CSV convergence traces."};
  app.set_config("--config", "", "flat key=value file mirroring the flags");

  std::string problem_kind;
  app.add_option("--problem", problem_kind, "problem family")
      ->required()
      ->check(CLI::IsMember({"hinge", "slcp"}));
  std::string data_path;
  app.add_option("--data", data_path, "sparse dataset file (hinge)");
  std::size_t slcp_n = 100;
  app.add_option("--n", slcp_n, "SLCP dimension (slcp; default 100)");
  double slcp_sigma = 10.0;
  app.add_option("--sigma", slcp_sigma, "SLCP volatility (slcp; default 10)");
  std::string alg = "all";
  app.add_option("--alg", alg, "algorithm (default all)")
      ->check(CLI::IsMember({"irbfgs", "hbfgs", "fbfgs", "all"}));
  std::size_t seeds = 10;
  app.add_option("--seeds", seeds, "number of independent runs (default 10)");
  std::uint64_t max_fev = 0;
  app.add_option("--max-fev", max_fev,
                 "scalar-product budget (default: 1e6/1e7 hinge by size, 1e5 slcp)");
  std::string out_dir = "out";
  app.add_option("--out", out_dir, "output directory (default ./out)");
  bool strict_beta = false;
  app.add_flag("--strict-beta", strict_beta,
               "abort a run when the restoration growth bound fails");
  std::uint64_t seed = 12345;
  app.add_option("--seed", seed, "base seed (IRNS_SEED overrides)");
  std::size_t n0 = 0;
  app.add_option("--n0", n0,
                 "initial sample size (default: ceil(0.1 N_max) hinge, 1000 slcp)");
  double lambda = 1e-5;
  app.add_option("--lambda", lambda, "hinge regularization (default 1e-5)");
  bool zero_one_labels = false;
  app.add_flag("--zero-one-labels", zero_one_labels,
               "map dataset labels 0/1 to -1/+1");

  if (argc <= 1) {
    std::cerr << app.help() << std::endl;
    return 2;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help() << std::endl;
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help() << std::endl;
    return 2;
  }

  if (const char* env = std::getenv("IRNS_SEED")) {
    std::uint64_t v = 0;
    const std::string s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
      std::cerr << "error: IRNS_SEED is not an integer: " << s << std::endl;
      return 2;
    }
    seed = v;
  }

  try {
    std::shared_ptr<const Problem> problem;
    MetricFn metric;
    if (problem_kind == "hinge") {
      if (data_path.empty())
        throw ConfigError("--problem hinge requires --data <path>");
      auto dataset = parse_sparse_dataset(
          data_path,
          zero_one_labels ? LabelMode::kZeroOne : LabelMode::kPlusMinusOne,
          /*dimension_override=*/0, lambda);
      auto hinge = std::make_shared<HingeProblem>(std::move(dataset));
      const std::size_t n_max = hinge->dataset().n_max();
      if (n0 == 0)
        n0 = static_cast<std::size_t>(
            std::ceil(0.1 * static_cast<double>(n_max)));
      if (max_fev == 0) max_fev = n_max >= 10000 ? 10000000ULL : 1000000ULL;
      metric = [hinge](const Eigen::VectorXd& x) { return hinge->full_objective(x); };
      problem = hinge;
    } else {
      auto erm = std::make_shared<ErmProblem>(
          generate_slcp(slcp_n, slcp_sigma, mix_seed(seed, kInstanceStream)));
      if (n0 == 0) n0 = 1000;
      if (max_fev == 0) max_fev = 100000ULL;
      const Eigen::VectorXd x_star = erm->x_star();
      metric = [x_star](const Eigen::VectorXd& x) { return (x - x_star).norm(); };
      problem = erm;
    }

    SolverConfig cfg;
    cfg.n0 = n0;
    cfg.max_fev = max_fev;
    cfg.seed = seed;
    cfg.strict_beta = strict_beta;

    std::vector<RunSpec> specs;
    for (Algorithm a : parse_algs(alg)) {
      RunSpec spec;
      spec.alg = a;
      spec.problem = problem;
      spec.metric = metric;
      spec.label = problem_kind + "_" + algorithm_name(a);
      spec.config = cfg;
      spec.num_runs = seeds;
      specs.push_back(std::move(spec));
    }

    const auto outputs = run_suite(specs, out_dir);
    for (const RunOutput& out : outputs) {
      double end_n = 0;
      for (const auto& res : out.results)
        end_n += static_cast<double>(res.n_final);
      end_n /= static_cast<double>(out.results.size());
      std::cout << out.label << ": " << out.results.size() << " runs, avg ending N = "
                << end_n << "\n  " << out.runs_csv.string() << "\n  "
                << out.aggregate_csv.string() << std::endl;
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
}

}  // namespace irns
