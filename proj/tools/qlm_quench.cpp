// Quench driver: builds the gauge-invariant sector, evolves an initial vacuum and
// writes <prefix>_timeseries.csv and <prefix>_events.json.

#include <atomic>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "qlm/qlm.hpp"

namespace {

struct CliOptions {
  qlm::RawRunConfig raw;
  std::string sweep_file;
  unsigned threads = 1;
  std::string dump_hamiltonian;
};

void add_run_options(CLI::App& app, qlm::RawRunConfig& raw) {
  app.add_option("--spin", raw.spin, "Link spin S, e.g. 1/2, 1, 3/2");
  app.add_option("--length", raw.length, "Number of matter sites L (even); default depends on S");
  app.add_option("--mass", raw.mass, "Mass mu/J (default 0)");
  app.add_option("--kappa", raw.kappa, "Gauge coupling kappa/J (default 0)");
  app.add_option("--model", raw.model, "qlm or tsm (default qlm)");
  app.add_option("--initial-vacuum", raw.initial_vacuum, "Initial vacuum m_z (default S)");
  app.add_option("--tmax", raw.tmax, "Final time in units of 1/J (default 30)");
  app.add_option("--dt", raw.dt, "Sampling and propagation step (default 0.01)");
  app.add_option("--krylov-dim", raw.krylov_dim, "Maximum Krylov vectors per step (default 30)");
  app.add_option("--tol", raw.tol, "Krylov error tolerance per step (default 1e-12)");
  app.add_option("--window", raw.window, "Coincidence window for OP-zero classification (default 0.5)");
  app.add_option("--out", raw.out, "Output prefix (default 'quench'); relative paths honor $QLM_OUTPUT_DIR");
  app.add_flag("--no-components", raw.no_components, "Omit per-vacuum rate columns from the CSV");
}

int run_one(const qlm::RunConfig& cfg, const std::string& dump_path, std::mutex& io_mutex) {
  if (!dump_path.empty()) {
    const auto basis = qlm::enumerate_basis(cfg.model);
    const auto h = qlm::build_hamiltonian(basis);
    qlm::write_atomically(dump_path, [&](std::ostream& os) { qlm::write_triplets(h, os); });
  }
  const auto result = qlm::simulate(cfg);
  qlm::write_artifacts(result);
  std::lock_guard lock(io_mutex);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << cfg.output_prefix << ": " << qlm::summary_line(result) << std::endl;
  return 0;
}

std::vector<qlm::RunConfig> read_sweep(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw qlm::ConfigError("--sweep", "cannot open '" + path + "'");
  std::vector<qlm::RunConfig> runs;
  std::set<std::string> prefixes;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    CLI::App sub{"sweep entry"};
    qlm::RawRunConfig raw;
    add_run_options(sub, raw);
    try {
      sub.parse(line, false);
    } catch (const CLI::ParseError& e) {
      throw qlm::ConfigError("--sweep", path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!raw.out) raw.out = "sweep_" + std::to_string(runs.size());
    auto cfg = qlm::validate(raw);
    if (!prefixes.insert(cfg.output_prefix).second) {
      throw qlm::ConfigError("--sweep", path + ":" + std::to_string(line_no) + ": duplicate output prefix '" +
                                            cfg.output_prefix + "'");
    }
    runs.push_back(cfg);
  }
  return runs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quench dynamics of the spin-S U(1) quantum link and truncated Schwinger models"};
  CliOptions opts;
  add_run_options(app, opts.raw);
  app.add_option("--sweep", opts.sweep_file, "File with one set of run flags per line");
  app.add_option("--threads", opts.threads, "Concurrent runs in sweep mode (default 1)")->check(CLI::PositiveNumber);
  app.add_option("--dump-hamiltonian", opts.dump_hamiltonian, "Write the sparse Hamiltonian as text triplets");
  app.set_config("--config", "", "Key-value config file (TOML/INI); flags override it");
  CLI11_PARSE(app, argc, argv);

  std::mutex io_mutex;
  try {
    if (opts.sweep_file.empty()) {
      return run_one(qlm::validate(opts.raw), opts.dump_hamiltonian, io_mutex);
    }

    const auto runs = read_sweep(opts.sweep_file);
    std::atomic<std::size_t> next{0};
    std::atomic<int> failures{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < runs.size(); i = next++) {
        try {
          run_one(runs[i], "", io_mutex);
        } catch (const std::exception& e) {
          std::lock_guard lock(io_mutex);
          std::cerr << "error: " << runs[i].output_prefix << ": " << e.what() << '\n';
          ++failures;
        }
      }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < std::max(1U, opts.threads); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return failures == 0 ? 0 : 1;
  } catch (const qlm::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
