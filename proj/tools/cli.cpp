#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "battle/analysis.hpp"
#include "battle/engine.hpp"
#include "battle/errors.hpp"

namespace battle::cli {

namespace fs = std::filesystem;

namespace {

/// Failures that map to a specific exit code.
struct Exit {
  int code;
  std::string message;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Exit{kRuntime, "cannot read " + path.string()};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Exit{kRuntime, "cannot write " + path.string()};
  out << text;
}

Scenario load(const std::string& id_or_path) {
  std::string text;
  try {
    text = resolve_scenario_text(id_or_path);
  } catch (const LookupError& e) {
    throw Exit{kValidation, e.what()};
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Exit{kValidation, id_or_path + ": " + e.what()};
  }
  try {
    return load_scenario(doc);
  } catch (const LoadError& e) {
    throw Exit{kValidation, id_or_path + ": " + e.what()};
  }
}

struct RunArgs {
  std::string scenario;
  std::string policy = "baseline";
  std::uint64_t seed = 1;
  int runs = 1;
  std::string out = "runs";
  std::optional<double> sight_range;
  std::optional<int> max_ticks;
  std::string casualty_transcript;
  int jobs = 0;
};

int cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
  const Scenario scenario = load(a.scenario);

  std::array<std::unique_ptr<Policy>, 2> owned;
  std::array<const Policy*, 2> policies{};
  if (a.policy == "baseline") {
    owned = baseline_policies(scenario);
  } else if (a.policy.rfind("replay:", 0) == 0) {
    auto replay = std::make_shared<ReplayPolicy>(ReplayPolicy::parse(read_file(a.policy.substr(7))));
    for (const auto& w : replay->load_warnings()) err << "warning: " << w << '\n';
    owned = {std::make_unique<ReplayPolicy>(*replay), std::make_unique<ReplayPolicy>(*replay)};
  } else if (a.policy == "passive") {
    owned = {std::make_unique<PassivePolicy>(), std::make_unique<PassivePolicy>()};
  } else {
    throw Exit{kUsage, "--policy must be baseline, passive or replay:<file>"};
  }
  policies = {owned[0].get(), owned[1].get()};

  std::optional<EvaluatorTranscript> transcript;
  if (!a.casualty_transcript.empty()) {
    transcript = EvaluatorTranscript::parse(read_file(a.casualty_transcript));
    for (const auto& w : transcript->warnings()) err << "warning: " << w << '\n';
  }

  std::error_code ec;
  fs::create_directories(a.out, ec);
  if (ec) throw Exit{kRuntime, "cannot create " + a.out + ": " + ec.message()};

  const auto count = static_cast<std::size_t>(a.runs);
  std::vector<RunRecord> records(count);
  std::vector<std::string> failures(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        RunOptions opt;
        opt.seed = a.seed + i;
        opt.max_ticks = a.max_ticks;
        opt.sight_range_m = a.sight_range;
        std::unique_ptr<CasualtyEvaluator> evaluator;
        if (transcript) evaluator = std::make_unique<ExternalEvaluator>(scenario.casualty, *transcript);
        records[i] = run(scenario, policies, opt, std::move(evaluator));
        write_file(fs::path(a.out) / (scenario.id + "-seed" + std::to_string(opt.seed) + ".jsonl"),
                   serialize(records[i]));
      } catch (const Exit& e) {
        failures[i] = e.message;
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t jobs = std::min<std::size_t>(count, a.jobs > 0 ? static_cast<std::size_t>(a.jobs) : hw);
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int code = kOk;
  for (std::size_t i = 0; i < count; ++i) {
    if (!failures[i].empty()) {
      err << "seed " << a.seed + i << ": " << failures[i] << '\n';
      code = kRuntime;
      continue;
    }
    const RunRecord& r = records[i];
    out << "seed " << r.seed;
    for (const auto& side : r.sides) out << "  " << side << " " << r.final_casualties(side);
    out << "  (" << to_string(r.termination) << " after " << r.ticks << " ticks)\n";
  }
  return code;
}

struct AnalyzeArgs {
  std::string records;
  std::string report;
  std::string side;
  std::vector<std::string> agents;
  std::string out;
  std::string format = "json";
  std::optional<std::uint64_t> seed;
  std::size_t top = 20;
};

std::vector<RunRecord> load_records(const std::string& where) {
  std::vector<fs::path> files;
  std::error_code ec;
  if (fs::is_regular_file(where, ec)) {
    files.emplace_back(where);
  } else if (fs::is_directory(where, ec)) {
    for (const auto& e : fs::directory_iterator(where)) {
      if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
  } else {
    throw Exit{kRuntime, "cannot read " + where};
  }
  if (files.empty()) throw Exit{kValidation, where + ": no run records (*.jsonl) found"};
  std::vector<RunRecord> out;
  for (const auto& f : files) {
    try {
      out.push_back(parse_record(read_file(f)));
    } catch (const LoadError& e) {
      throw Exit{kValidation, f.string() + ": " + e.what()};
    }
  }
  return out;
}

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
  std::vector<RunRecord> records = load_records(a.records);
  if (a.seed) {
    std::erase_if(records, [&](const RunRecord& r) { return r.seed != *a.seed; });
    if (records.empty()) throw Exit{kValidation, "no record with seed " + std::to_string(*a.seed)};
  }
  std::string text;
  if (a.report == "casualty") {
    std::vector<ReferenceRange> reference;
    try {
      reference = load(records.front().scenario_id).reference;
    } catch (const Exit&) {
      // Unknown scenario: report without reference ranges.
    }
    CasualtyReport report;
    try {
      report = casualty_report(records, reference);
    } catch (const std::invalid_argument& e) {
      throw Exit{kValidation, e.what()};
    }
    text = a.format == "csv" ? casualty_csv(report) : to_json(report).dump(2) + "\n";
  } else if (a.report == "trace") {
    const auto trace = movement_trace(records.front());
    text = trace_jsonl(trace);
  } else if (a.report == "tracker") {
    if (a.agents.empty()) throw Exit{kUsage, "--report tracker needs --agents"};
    try {
      text = tracker_csv(action_tracker(records.front(), a.agents));
    } catch (const LookupError& e) {
      throw Exit{kValidation, e.what()};
    }
  } else if (a.report == "wordfreq") {
    if (a.side.empty()) throw Exit{kUsage, "--report wordfreq needs --side"};
    const auto& sides = records.front().sides;
    auto it = std::find_if(sides.begin(), sides.end(), [&](const std::string& s) {
      return std::equal(s.begin(), s.end(), a.side.begin(), a.side.end(),
                        [](char x, char y) { return std::tolower(x) == std::tolower(y); });
    });
    if (it == sides.end()) throw Exit{kValidation, "unknown side " + a.side};
    const auto corpus = side_corpus(records, *it);
    text = frequency_csv(word_frequency(corpus), a.top);
  }
  if (a.out.empty()) {
    out << text;
  } else {
    write_file(a.out, text);
  }
  return kOk;
}

int cmd_validate(const std::string& path, std::ostream& out) {
  std::string text;
  if (fs::exists(path)) {
    text = read_file(path);
  } else {
    try {
      text = resolve_scenario_text(path);
    } catch (const LookupError&) {
      throw Exit{kRuntime, "cannot read " + path};
    }
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    out << "$: not valid JSON (" << e.what() << ")\n";
    return kValidation;
  }
  const auto violations = validate_scenario(doc);
  if (violations.empty()) {
    out << "ok\n";
    return kOk;
  }
  for (const auto& v : violations) out << v << '\n';
  return kValidation;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Deterministic battle emulation"};
  app.require_subcommand(1);

  RunArgs ra;
  auto* run_cmd = app.add_subcommand("run", "Run seeded emulations and write run records");
  run_cmd->add_option("scenario", ra.scenario, "Builtin id or scenario file")->required();
  run_cmd->add_option("--policy", ra.policy, "baseline, passive or replay:<file>");
  run_cmd->add_option("--seed", ra.seed, "Seed of the first run");
  run_cmd->add_option("--runs", ra.runs, "Number of runs (seeds seed..seed+runs-1)")->check(CLI::Range(1, 100000));
  run_cmd->add_option("--out", ra.out, "Output directory");
  run_cmd->add_option("--sight-range", ra.sight_range, "Sight range in meters")->check(CLI::PositiveNumber);
  run_cmd->add_option("--max-ticks", ra.max_ticks, "Tick limit")->check(CLI::Range(1, 1000000));
  run_cmd->add_option("--casualty-transcript", ra.casualty_transcript, "Recorded casualty assessments");
  run_cmd->add_option("--jobs", ra.jobs, "Parallel workers (default: hardware threads)")->check(CLI::NonNegativeNumber);

  AnalyzeArgs aa;
  auto* analyze_cmd = app.add_subcommand("analyze", "Summaries and exports from run records");
  analyze_cmd->add_option("records", aa.records, "Directory of run records or a single record")->required();
  analyze_cmd->add_option("--report", aa.report, "casualty, trace, tracker or wordfreq")
      ->required()
      ->check(CLI::IsMember({"casualty", "trace", "tracker", "wordfreq"}));
  analyze_cmd->add_option("--side", aa.side, "Side for wordfreq");
  analyze_cmd->add_option("--agents", aa.agents, "Agent ids for tracker");
  analyze_cmd->add_option("--format", aa.format, "json or csv (casualty)")->check(CLI::IsMember({"json", "csv"}));
  analyze_cmd->add_option("--seed", aa.seed, "Select the record with this seed");
  analyze_cmd->add_option("--top", aa.top, "Rows in the wordfreq table");
  analyze_cmd->add_option("--out", aa.out, "Write to a file instead of standard output");

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check a scenario document");
  validate_cmd->add_option("scenario", validate_path, "Scenario file or builtin id")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(ra, out, err);
    if (analyze_cmd->parsed()) return cmd_analyze(aa, out);
    return cmd_validate(validate_path, out);
  } catch (const Exit& e) {
    err << "error: " << e.message << '\n';
    return e.code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
}

}  // namespace battle::cli
