#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

using contractlab::cli::json;
namespace cli = contractlab::cli;
namespace fs = std::filesystem;

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("contractlab");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* lvl = std::getenv("CONTRACTLAB_LOG"))
    spdlog::set_level(spdlog::level::from_str(lvl));
}

void emit(const json& report, const std::string& output, bool pretty) {
  const std::string text = pretty ? cli::render_pretty(report) : cli::render_json(report);
  if (output.empty()) {
    std::cout << text;
  } else {
    cli::write_file(output, text);
    spdlog::info("wrote {}", output);
  }
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"Set-contractivity analysis of matrices, matrix products and coupled map lattices"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "contractlab 0.1.0");

  cli::Options opts;
  std::string norm_flag;
  std::string output;
  bool pretty = false;
  std::uint64_t seed = 0;
  std::size_t horizon = 0, block_len = 0, steps = 0;
  double sync_tol = 0.0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--norm", norm_flag, "Norm: linf, l2, l1, wl2")
        ->check(CLI::IsMember({"linf", "l2", "l1", "wl2"}));
    sub->add_option("--weights", opts.weights, "Weights for wl2: file path or comma-separated list");
    sub->add_option("--zero-tol", opts.zero_tol, "Entries with |a| <= tol count as zero")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--row-sum-tol", opts.row_sum_tol, "Tolerance for constant row sums")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", seed, "Random seed");
    sub->add_option("--output,-o", output, "Write the report to this path");
    sub->add_flag("--pretty", pretty, "Human-readable output instead of JSON");
    sub->add_option("--jobs,-j", opts.jobs, "Concurrent jobs")->check(CLI::PositiveNumber);
  };

  std::vector<std::string> analyze_files;
  auto* analyze = app.add_subcommand("analyze", "Structural and contractivity report for matrices");
  analyze->add_option("matrices", analyze_files, "Matrix files (JSON or CSV)")->required();
  add_common(analyze);

  std::string matrix_path;
  auto* contract = app.add_subcommand("contractivity", "Set-contractivity coefficient under one norm");
  contract->add_option("matrix", matrix_path, "Matrix file")->required();
  contract->add_option("--samples", opts.samples, "Random samples for the empirical estimate (0 = off)");
  add_common(contract);

  std::string sequence_path;
  auto* product = app.add_subcommand("product", "Composite of a matrix sequence and its coefficients");
  product->add_option("sequence", sequence_path, "Sequence spec (JSON)")->required();
  product->add_option("--horizon", horizon, "Number of items to use")->check(CLI::PositiveNumber);
  add_common(product);

  auto* ergodic = app.add_subcommand("ergodicity", "Finite-horizon weak-ergodicity diagnostic");
  ergodic->add_option("sequence", sequence_path, "Sequence spec (JSON)")->required();
  ergodic->add_option("--horizon", horizon, "Number of items to use")->check(CLI::PositiveNumber);
  ergodic->add_option("--block-len", block_len, "Block length (default n-1)")->check(CLI::PositiveNumber);
  add_common(ergodic);

  std::string config_path;
  auto* simulate = app.add_subcommand("simulate", "Simulate a coupled map lattice");
  simulate->add_option("config", config_path, "Simulation config (JSON)")->required();
  simulate->add_option("--steps", steps, "Override the number of steps");
  simulate->add_option("--sync-tol", sync_tol, "Synchronization threshold")->check(CLI::PositiveNumber);
  add_common(simulate);

  std::string vector_arg;
  auto* decompose = app.add_subcommand("decompose", "Write Ax as Bx + x* with B stochastic");
  decompose->add_option("matrix", matrix_path, "Matrix file")->required();
  decompose->add_option("x", vector_arg, "Vector file or comma-separated list")->required();
  add_common(decompose);

  auto* reproduce = app.add_subcommand("reproduce-paper", "Check the built-in reference examples");
  reproduce->add_option("--output,-o", output, "Write the report to this path");
  reproduce->add_flag("--pretty", pretty, "Human-readable table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  auto* sub = app.get_subcommands().front();
  auto given = [sub](const char* name) {
    const auto* opt = sub->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (given("--norm")) {
    opts.norm = norm_flag;
    opts.norm_override = norm_flag;
  }
  if (given("--seed")) opts.seed = seed;
  if (given("--horizon")) opts.horizon = horizon;
  if (given("--block-len")) opts.block_len = block_len;
  if (given("--steps")) opts.steps = steps;
  if (given("--sync-tol")) opts.sync_tol = sync_tol;
  spdlog::debug("subcommand {}", sub->get_name());

  try {
    if (sub == analyze) {
      const auto results = cli::analyze_files(analyze_files, opts);
      int code = 0;
      for (const auto& r : results) {
        if (!r.error.empty()) {
          spdlog::debug("{} failed", r.file);
          std::cerr << "error: " << r.error << "\n";
          code = std::max(code, r.exit_code);
        }
      }
      if (results.size() == 1) {
        if (results.front().report) emit(*results.front().report, output, pretty);
        return code;
      }
      if (!output.empty()) {
        fs::create_directories(output);
        for (const auto& r : results) {
          if (!r.report) continue;
          const auto path = fs::path(output) / (fs::path(r.file).stem().string() + ".json");
          emit(*r.report, path.string(), pretty);
        }
        return code;
      }
      json all = json::array();
      for (const auto& r : results)
        all.push_back(r.report ? json{{"file", r.file}, {"report", *r.report}}
                               : json{{"file", r.file}, {"error", r.error}});
      emit(all, "", pretty);
      return code;
    }
    if (sub == contract) {
      emit(cli::contractivity_cmd(contractlab::io::load_matrix(matrix_path, opts.zero_tol), opts), output,
           pretty);
    } else if (sub == product) {
      emit(cli::product_cmd(contractlab::io::load_sequence(sequence_path, opts.zero_tol), opts), output,
           pretty);
    } else if (sub == ergodic) {
      emit(cli::ergodicity_cmd(contractlab::io::load_sequence(sequence_path, opts.zero_tol), opts), output,
           pretty);
    } else if (sub == simulate) {
      emit(cli::simulate_cmd(config_path, opts), output, pretty);
    } else if (sub == decompose) {
      emit(cli::decompose_cmd(contractlab::io::load_matrix(matrix_path, opts.zero_tol),
                              contractlab::io::load_vector_or_list(vector_arg), opts),
           output, pretty);
    } else if (sub == reproduce) {
      bool all_pass = false;
      emit(cli::reproduce_cmd(all_pass), output, pretty);
      return all_pass ? 0 : 1;
    }
  } catch (const contractlab::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const contractlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return 0;
}
