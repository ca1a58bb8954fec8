#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "fdipx/experiment.hpp"

using namespace fdipx;

namespace {

bool parse_onoff(const std::string& s, const char* what) {
  if (s == "on" || s == "true" || s == "1") return true;
  if (s == "off" || s == "false" || s == "0") return false;
  throw ConfigError(std::string(what) + ": expected on or off, got " + s);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open output: " + path);
  return f;
}

int run(CLI::App& app, int argc, char** argv) {
  ExperimentConfig cfg;
  std::string btb_mode_s = "fdipx";
  std::string tag_mode_s = "compressed16";
  std::string direction_s = "oracle";
  std::string prefetch_s = "on";
  std::string unbounded_s = "off";
  bool dump = false;

  app.set_version_flag("--version", std::string(kToolVersion));
  app.set_config("--config", "", "flat key=value configuration file");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.add_flag("--dump-config", dump, "print the resolved configuration and exit");

  app.add_option("--trace", cfg.trace_path, "trace file, binary or text form");
  app.add_option("--btb-mode", btb_mode_s, "fdip-block | monolithic-instr | fdipx");
  app.add_option("--baseline-entries", cfg.sim.baseline_entries,
                 "baseline entry budget driving the geometry");
  app.add_option("--tag-mode", tag_mode_s, "full | compressed16");
  app.add_option("--unbounded", unbounded_s, "on | off: ignore capacity limits");
  app.add_option("--prefetch", prefetch_s, "on | off");
  app.add_option("--ftq-capacity", cfg.sim.ftq_capacity);
  app.add_option("--fetch-width", cfg.sim.fetch_width);
  app.add_option("--lookup-bandwidth", cfg.sim.lookup_bandwidth);
  app.add_option("--prefetch-scan-rate", cfg.sim.prefetch_scan_rate);
  app.add_option("--miss-latency", cfg.sim.miss_latency);
  app.add_option("--resteer-penalty", cfg.sim.resteer_penalty);
  app.add_option("--l1i-sets", cfg.sim.l1i_sets);
  app.add_option("--l1i-ways", cfg.sim.l1i_ways);
  app.add_option("--ras-capacity", cfg.sim.ras_capacity);
  app.add_option("--direction", direction_s, "oracle | bimodal");
  app.add_option("--bimodal-entries", cfg.sim.bimodal_entries);

  std::string out_path;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "run one simulation");
  sim_cmd->fallthrough();
  sim_cmd->add_option("--out", out_path, "CSV output file (default stdout)");

  SweepOptions sweep_opt;
  std::vector<std::string> budget_args;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "budget sweep over fdip-block and fdipx");
  sweep_cmd->fallthrough();
  sweep_cmd->add_option("--budgets", budget_args,
                        "baseline entry counts or inf (default: all table rows)")
      ->delimiter(',');
  sweep_cmd->add_option("--jobs", sweep_opt.jobs, "parallel workers, 0 = all cores");
  sweep_cmd->add_option("--out", out_path, "CSV output file (default stdout)");

  bool check = false;
  CLI::App* table_cmd =
      app.add_subcommand("storage-table", "print the storage geometry tables");
  table_cmd->fallthrough();
  table_cmd->add_flag("--check", check,
                      "verify every cell against the expected values");

  int threads = 0;
  CLI::App* analyze_cmd =
      app.add_subcommand("analyze-offsets", "branch offset histogram CSV");
  analyze_cmd->fallthrough();
  analyze_cmd->add_option("--threads", threads, "analyzer threads, 0 = default");
  analyze_cmd->add_option("--out", out_path, "CSV output file (default stdout)");

  std::string spec_path;
  std::optional<std::uint64_t> g_seed, g_instrs, g_footprint;
  std::optional<std::uint32_t> g_branches;
  std::vector<double> g_mix, g_depths;
  bool g_text = false;
  CLI::App* gen_cmd = app.add_subcommand("gen-trace", "write a synthetic trace");
  gen_cmd->fallthrough();
  gen_cmd->add_option("--spec", spec_path, "generator spec file (key=value)");
  gen_cmd->add_option("--seed", g_seed);
  gen_cmd->add_option("--instructions", g_instrs);
  gen_cmd->add_option("--branches", g_branches, "static branch count");
  gen_cmd->add_option("--mix", g_mix, "five offset-class weights")->delimiter(',');
  gen_cmd->add_option("--footprint", g_footprint, "code footprint in bytes");
  gen_cmd->add_option("--call-depths", g_depths, "call-chain depth weights")
      ->delimiter(',');
  gen_cmd->add_flag("--text", g_text, "write the line-oriented text form");
  gen_cmd->add_option("--out", out_path, "trace output file");

  app.require_subcommand(0, 1);
  app.parse(argc, argv);

  cfg.sim.btb_mode = [&] {
    const auto m = btb_mode_from_string(btb_mode_s);
    if (!m) throw ConfigError("btb-mode: unknown mode " + btb_mode_s);
    return *m;
  }();
  cfg.sim.tag_mode = [&] {
    const auto m = tag_mode_from_string(tag_mode_s);
    if (!m) throw ConfigError("tag-mode: unknown mode " + tag_mode_s);
    return *m;
  }();
  cfg.sim.direction = [&] {
    const auto d = direction_policy_from_string(direction_s);
    if (!d) throw ConfigError("direction: unknown policy " + direction_s);
    return *d;
  }();
  cfg.sim.prefetch = parse_onoff(prefetch_s, "prefetch");
  cfg.sim.btb_unbounded = parse_onoff(unbounded_s, "unbounded");

  if (dump) {
    std::cout << "# " << kToolVersion << "\n";
    for (const auto& [k, v] : config_kv(cfg)) std::cout << k << '=' << v << "\n";
    return 0;
  }

  if (app.got_subcommand(sim_cmd)) {
    if (out_path.empty()) {
      run_simulate(cfg, std::cout, std::cerr);
    } else {
      auto f = open_out(out_path);
      run_simulate(cfg, f, std::cerr);
    }
    return 0;
  }
  if (app.got_subcommand(sweep_cmd)) {
    sweep_opt.budgets = budget_args;
    if (out_path.empty()) {
      run_sweep(cfg, sweep_opt, std::cout);
    } else {
      auto f = open_out(out_path);
      run_sweep(cfg, sweep_opt, f);
    }
    return 0;
  }
  if (app.got_subcommand(table_cmd)) {
    print_storage_tables(std::cout);
    if (check) {
      const auto bad = storage_table_mismatches();
      if (!bad.empty()) {
        for (const std::string& cell : bad) std::cerr << "mismatch: " << cell << "\n";
        std::cerr << "storage self-check failed: " << bad.size() << " cells\n";
        return 3;
      }
      std::cerr << "storage tables verified: all cells match\n";
    }
    return 0;
  }
  if (app.got_subcommand(analyze_cmd)) {
    if (out_path.empty()) {
      run_analyze(cfg, threads, std::cout);
    } else {
      auto f = open_out(out_path);
      run_analyze(cfg, threads, f);
    }
    return 0;
  }
  if (app.got_subcommand(gen_cmd)) {
    GeneratorSpec spec;
    if (!spec_path.empty()) spec = load_generator_spec(spec_path);
    if (g_seed) spec.seed = *g_seed;
    if (g_instrs) spec.instruction_count = *g_instrs;
    if (g_branches) spec.static_branch_count = *g_branches;
    if (!g_mix.empty()) {
      if (g_mix.size() != 5) throw ConfigError("mix: expected 5 weights");
      std::copy(g_mix.begin(), g_mix.end(), spec.offset_mix.begin());
    }
    if (g_footprint) spec.code_footprint_bytes = *g_footprint;
    if (!g_depths.empty()) spec.call_depth_weights = g_depths;
    if (out_path.empty()) throw ConfigError("gen-trace: --out is required");
    const GenSummary s = run_gen_trace(spec, out_path, g_text);
    std::cout << "# " << kToolVersion << "\n";
    for (const auto& [k, v] : generator_spec_kv(spec))
      std::cout << "# " << k << '=' << v << "\n";
    std::cout << "records=" << s.records << "\n";
    std::cout << "ring-blocks=" << s.ring_blocks << "\n";
    std::cout << "chain-sites=" << s.chain_sites << "\n";
    std::cout << "static-branches=" << s.static_branches << "\n";
    std::cout << "laps=" << s.laps << "\n";
    return 0;
  }

  std::cerr << app.help();
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trace-driven front-end prefetch simulator and BTB storage explorer"};
  try {
    return run(app, argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
