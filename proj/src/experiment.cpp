#include "fdipx/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "fdipx/offset_hist.hpp"

namespace fdipx {

const char* to_string(TagMode m) {
  return m == TagMode::Full ? "full" : "compressed16";
}

std::optional<TagMode> tag_mode_from_string(std::string_view name) {
  if (name == "full") return TagMode::Full;
  if (name == "compressed16") return TagMode::Compressed16;
  return std::nullopt;
}

namespace {

const char* onoff(bool b) { return b ? "on" : "off"; }

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
  std::size_t pos = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(text, &pos);
  } catch (const std::exception&) {
    throw ConfigError(what + ": not a number: " + text);
  }
  if (pos != text.size()) throw ConfigError(what + ": not a number: " + text);
  return v;
}

std::vector<double> parse_weights(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError(what + ": empty element");
    std::size_t pos = 0;
    double v = 0;
    try {
      v = std::stod(item, &pos);
    } catch (const std::exception&) {
      throw ConfigError(what + ": not a number: " + item);
    }
    if (pos != item.size() || v < 0)
      throw ConfigError(what + ": bad weight: " + item);
    out.push_back(v);
  }
  return out;
}

std::string join_weights(const std::vector<double>& w) {
  std::string out;
  char buf[32];
  for (std::size_t i = 0; i < w.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%g", w[i]);
    if (i) out += ',';
    out += buf;
  }
  return out;
}

std::string budget_label(const SimConfig& c) {
  return c.btb_unbounded ? "inf" : std::to_string(c.baseline_entries);
}

constexpr const char* kStatsHeader =
    "mode,budget,tag,prefetch,direction,instructions,cycles,l1i_accesses,"
    "l1i_misses,l1i_prefetch_hits,l1i_late_prefetch_hits,demand_stall_cycles,"
    "prefetches_issued,prefetches_filtered,prefetches_useful,btb_hits_p0,"
    "btb_hits_p1,btb_hits_p2,btb_hits_p3,btb_misses,resteers,multi_hits";

std::string stats_row(const SimConfig& c, const SimStats& s) {
  std::ostringstream o;
  o << to_string(c.btb_mode) << ',' << budget_label(c) << ','
    << to_string(c.tag_mode) << ',' << onoff(c.prefetch) << ','
    << to_string(c.direction) << ',' << s.instructions << ',' << s.cycles << ','
    << s.l1i_accesses << ',' << s.l1i_misses << ',' << s.l1i_prefetch_hits << ','
    << s.l1i_late_prefetch_hits << ',' << s.demand_stall_cycles << ','
    << s.prefetches_issued << ',' << s.prefetches_filtered << ','
    << s.prefetches_useful << ',' << s.btb_hits[0] << ',' << s.btb_hits[1] << ','
    << s.btb_hits[2] << ',' << s.btb_hits[3] << ',' << s.btb_misses << ','
    << s.resteers << ',' << s.multi_hits;
  return o.str();
}

double per_kilo(std::uint64_t count, std::uint64_t instructions) {
  return instructions ? 1000.0 * static_cast<double>(count) /
                            static_cast<double>(instructions)
                      : 0.0;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> config_kv(const ExperimentConfig& cfg) {
  const SimConfig& s = cfg.sim;
  return {
      {"trace", cfg.trace_path},
      {"btb-mode", to_string(s.btb_mode)},
      {"baseline-entries", std::to_string(s.baseline_entries)},
      {"tag-mode", to_string(s.tag_mode)},
      {"unbounded", onoff(s.btb_unbounded)},
      {"prefetch", onoff(s.prefetch)},
      {"ftq-capacity", std::to_string(s.ftq_capacity)},
      {"fetch-width", std::to_string(s.fetch_width)},
      {"lookup-bandwidth", std::to_string(s.lookup_bandwidth)},
      {"prefetch-scan-rate", std::to_string(s.prefetch_scan_rate)},
      {"miss-latency", std::to_string(s.miss_latency)},
      {"resteer-penalty", std::to_string(s.resteer_penalty)},
      {"l1i-sets", std::to_string(s.l1i_sets)},
      {"l1i-ways", std::to_string(s.l1i_ways)},
      {"ras-capacity", std::to_string(s.ras_capacity)},
      {"direction", to_string(s.direction)},
      {"bimodal-entries", std::to_string(s.bimodal_entries)},
  };
}

void echo_config(std::ostream& out, const ExperimentConfig& cfg) {
  out << "# " << kToolVersion << "\n";
  for (const auto& [k, v] : config_kv(cfg)) out << "# " << k << '=' << v << "\n";
}

std::optional<std::uint64_t> parse_budget(const std::string& text) {
  std::string t = trim(text);
  if (t == "inf") return std::nullopt;
  std::uint64_t mult = 1;
  if (!t.empty() && (t.back() == 'K' || t.back() == 'k')) {
    mult = 1024;
    t.pop_back();
  }
  const std::uint64_t v = parse_u64(t, "budget") * mult;
  if (v == 0) throw ConfigError("budget: must be positive");
  return v;
}

GeneratorSpec load_generator_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open spec file: " + path);
  GeneratorSpec spec;
  std::string line;
  std::uint64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key == "seed") {
      spec.seed = parse_u64(value, key);
    } else if (key == "instruction-count") {
      spec.instruction_count = parse_u64(value, key);
    } else if (key == "static-branch-count") {
      spec.static_branch_count = static_cast<std::uint32_t>(parse_u64(value, key));
    } else if (key == "offset-mix") {
      const auto w = parse_weights(value, key);
      if (w.size() != 5) throw ConfigError("offset-mix: expected 5 weights");
      std::copy(w.begin(), w.end(), spec.offset_mix.begin());
    } else if (key == "footprint-bytes") {
      spec.code_footprint_bytes = parse_u64(value, key);
    } else if (key == "call-depth-weights") {
      spec.call_depth_weights = value.empty() ? std::vector<double>{}
                                              : parse_weights(value, key);
    } else {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": unknown key " + key);
    }
  }
  return spec;
}

std::vector<std::pair<std::string, std::string>> generator_spec_kv(const GeneratorSpec& spec) {
  return {
      {"seed", std::to_string(spec.seed)},
      {"instruction-count", std::to_string(spec.instruction_count)},
      {"static-branch-count", std::to_string(spec.static_branch_count)},
      {"offset-mix", join_weights({spec.offset_mix.begin(), spec.offset_mix.end()})},
      {"footprint-bytes", std::to_string(spec.code_footprint_bytes)},
      {"call-depth-weights", join_weights(spec.call_depth_weights)},
  };
}

void run_simulate(const ExperimentConfig& cfg, std::ostream& csv, std::ostream& human) {
  if (cfg.trace_path.empty()) throw ConfigError("simulate: no trace given");
  std::ifstream in(cfg.trace_path, std::ios::binary);
  if (!in) throw ConfigError("cannot open trace: " + cfg.trace_path);
  TraceReader reader(in);
  const TraceSource source = [&reader] { return reader.next(); };
  const SimStats st = simulate(source, cfg.sim);

  echo_config(csv, cfg);
  csv << kStatsHeader << "\n" << stats_row(cfg.sim, st) << "\n";

  char buf[160];
  const SimConfig& c = cfg.sim;
  human << "trace:           " << cfg.trace_path << " (" << st.instructions
        << " records)\n";
  human << "config:          " << to_string(c.btb_mode) << ", budget "
        << budget_label(c) << ", tags " << to_string(c.tag_mode) << ", prefetch "
        << onoff(c.prefetch) << ", direction " << to_string(c.direction) << "\n";
  human << "cycles:          " << st.cycles << "\n";
  std::snprintf(buf, sizeof buf, "l1i:             %llu accesses, %llu misses (%.2f mpki)\n",
                static_cast<unsigned long long>(st.l1i_accesses),
                static_cast<unsigned long long>(st.l1i_misses),
                per_kilo(st.l1i_misses, st.instructions));
  human << buf;
  human << "demand stalls:   " << st.demand_stall_cycles << " cycles\n";
  human << "prefetches:      " << st.prefetches_issued << " issued, "
        << st.prefetches_useful << " useful, " << st.prefetches_filtered
        << " filtered, " << st.l1i_late_prefetch_hits << " late\n";
  human << "btb:             hits " << st.btb_hits[0] << '/' << st.btb_hits[1]
        << '/' << st.btb_hits[2] << '/' << st.btb_hits[3] << ", misses "
        << st.btb_misses << ", multi " << st.multi_hits << "\n";
  std::snprintf(buf, sizeof buf, "resteers:        %llu (%.2f per kilo-instruction)\n",
                static_cast<unsigned long long>(st.resteers),
                per_kilo(st.resteers, st.instructions));
  human << buf;
}

void run_sweep(const ExperimentConfig& cfg, const SweepOptions& opt, std::ostream& csv) {
  if (cfg.trace_path.empty()) throw ConfigError("sweep: no trace given");
  const std::vector<TraceRecord> trace = read_trace_file(cfg.trace_path);

  std::vector<std::string> budgets = opt.budgets;
  if (budgets.empty())
    budgets = {"1024", "2048", "4096", "8192", "16384", "32768", "inf"};

  struct Point {
    SimConfig sim;
    std::string label;
  };
  std::vector<Point> points;
  for (const std::string& b : budgets) {
    const auto budget = parse_budget(b);
    for (const BtbMode mode : {BtbMode::FdipBlock, BtbMode::FdipxEnsemble}) {
      SimConfig s = cfg.sim;
      s.btb_mode = mode;
      if (budget) {
        s.btb_unbounded = false;
        s.baseline_entries = static_cast<std::uint32_t>(*budget);
        if (mode == BtbMode::FdipBlock) s.tag_mode = TagMode::Full;
      } else {
        s.btb_unbounded = true;
        s.tag_mode = TagMode::Full;
      }
      points.push_back({s, budget ? std::to_string(*budget) : "inf"});
    }
  }

  std::vector<std::string> rows(points.size());
  std::atomic<std::size_t> next{0};
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned jobs = std::min<std::size_t>(opt.jobs ? opt.jobs : hw, points.size());
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < points.size();
         i = next.fetch_add(1)) {
      try {
        const SimStats st =
            simulate(std::span<const TraceRecord>(trace), points[i].sim);
        rows[i] = stats_row(points[i].sim, st) + ",ok";
      } catch (const std::exception& e) {
        rows[i] = stats_row(points[i].sim, SimStats{}) + ",error: " + e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  echo_config(csv, cfg);
  csv << "# budgets=";
  for (std::size_t i = 0; i < budgets.size(); ++i)
    csv << (i ? "," : "") << budgets[i];
  csv << "\n" << kStatsHeader << ",status\n";
  for (const std::string& r : rows) csv << r << "\n";
}

void run_analyze(const ExperimentConfig& cfg, int threads, std::ostream& csv) {
  if (cfg.trace_path.empty()) throw ConfigError("analyze-offsets: no trace given");
  const std::vector<TraceRecord> trace = read_trace_file(cfg.trace_path);
  const OffsetHistogram hist =
      analyze_offsets_parallel(std::span<const TraceRecord>(trace), threads);
  csv << "# " << kToolVersion << "\n";
  csv << "# trace=" << cfg.trace_path << "\n";
  csv << "# records=" << trace.size() << "\n";
  write_histogram_csv(csv, hist);
}

GenSummary run_gen_trace(const GeneratorSpec& spec, const std::string& out_path,
                         bool text) {
  std::ofstream out(out_path, text ? std::ios::out : std::ios::out | std::ios::binary);
  if (!out) throw ConfigError("cannot open output: " + out_path);
  TraceWriter writer(out, text);
  const GenSummary summary =
      generate_trace(spec, [&writer](const TraceRecord& r) { writer.write(r); });
  out.flush();
  if (!out) throw DataError("write failed: " + out_path);
  return summary;
}

}  // namespace fdipx
