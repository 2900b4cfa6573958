#include "lfuzz/report.h"

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

namespace lfuzz {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string_view MetricStrategyName(MetricStrategy s) {
  return s == MetricStrategy::kRarestSite ? "rarest-site" : "random";
}

std::string_view PickStrategyName(PickStrategy s) {
  return s == PickStrategy::kRarity ? "rarity" : "random";
}

std::string FormatSeconds(double s) {
  std::ostringstream os;
  os.precision(6);
  os << std::fixed << s;
  return os.str();
}

void WriteFile(const fs::path& file, const std::string& contents) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw ReportError("cannot open " + file.string() + " for writing: " +
                      std::strerror(errno));
  }
  out << contents;
  out.close();
  if (!out) throw ReportError("error writing " + file.string());
}

template <typename T>
T Field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ReportError(std::string("report is missing field '") + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw ReportError(std::string("report field '") + key + "': " + e.what());
  }
}

}  // namespace

json CampaignConfigToJson(const CampaignConfig& cfg) {
  json j = {
      {"rng_seed", cfg.rng_seed},
      {"learning", cfg.learning_enabled},
      {"max_execs", cfg.max_execs},
      {"time_limit", cfg.time_limit_seconds ? json(*cfg.time_limit_seconds) : json()},
      {"target_paths", cfg.target_paths ? json(*cfg.target_paths) : json()},
      {"stop_on_bug", cfg.stop_on_bug ? json(BugKindName(*cfg.stop_on_bug)) : json()},
      {"max_calls", cfg.max_calls},
      {"metric_strategy", MetricStrategyName(cfg.metric_strategy)},
      {"pick", PickStrategyName(cfg.pick_strategy)},
      {"energy_base", cfg.energy.base},
      {"energy_cap", cfg.energy.cap},
      {"structural_mutation", cfg.mutation.structural},
      {"word_bits", cfg.exec.word.bits},
      {"checked_arithmetic", cfg.exec.checked_arithmetic},
      {"fuel", cfg.exec.fuel},
      {"ignore_entry_requires", cfg.detector.ignore_entry_requires},
  };
  return j;
}

CampaignReport MakeReport(const TargetProgram& prog, const std::string& target,
                          const CampaignConfig& cfg, const CampaignResult& result) {
  CampaignReport r;
  r.target = target;
  r.config = CampaignConfigToJson(cfg);
  r.probe_address = result.probe_address;
  r.stop_reason = StopReasonName(result.stop_reason);
  r.seconds = result.stats.seconds;
  r.paths = result.corpus.size();
  r.bug_count = result.bugs.size();
  r.execs = result.stats.execs;
  r.learn_success = result.stats.learn_success;
  r.learn_fail = result.stats.learn_fail;
  r.learn_rate = result.stats.learn_rate();
  r.coverage = result.coverage;
  uint64_t id = 0;
  for (const Bug& b : result.bugs.bugs()) {
    r.bugs.push_back({++id, b.kind, b.site, b.first_seen_seconds, b.first_seen_exec,
                      InputToJson(prog, b.witness)});
  }
  for (const CorpusEntry& e : result.corpus.entries()) {
    r.corpus.push_back({PathIdHex(e.path_id), InputToJson(prog, e.input),
                        e.found_at_exec, e.found_at_seconds});
  }
  return r;
}

json ReportToJson(const CampaignReport& r) {
  json coverage = json::array();
  for (const CoveragePoint& p : r.coverage) {
    coverage.push_back({{"seconds", p.seconds}, {"execs", p.execs}, {"paths", p.paths}});
  }
  json bugs = json::array();
  json bug_times = json::array();
  for (const ReportBug& b : r.bugs) {
    bugs.push_back({{"id", b.id},
                    {"kind", BugKindName(b.kind)},
                    {"site", b.site},
                    {"seconds", b.seconds},
                    {"execs", b.execs},
                    {"witness", b.witness}});
    bug_times.push_back({{"id", b.id}, {"seconds", b.seconds}});
  }
  json corpus = json::array();
  for (const ReportEntry& e : r.corpus) {
    corpus.push_back({{"path_id", e.path_id},
                      {"input", e.input},
                      {"execs", e.execs},
                      {"seconds", e.seconds}});
  }
  return {
      {"target", r.target},
      {"config", r.config},
      {"probe_address", r.probe_address},
      {"stop_reason", r.stop_reason},
      {"seconds", r.seconds},
      {"P", r.paths},
      {"B", r.bug_count},
      {"E", r.execs},
      {"S_L", r.learn_success},
      {"F_L", r.learn_fail},
      {"R_L", r.learn_rate ? json(*r.learn_rate) : json()},
      {"coverage_series", coverage},
      {"bug_times", bug_times},
      {"bugs", bugs},
      {"corpus", corpus},
  };
}

CampaignReport ReportFromJson(const json& j) {
  if (!j.is_object()) throw ReportError("report is not a JSON object");
  CampaignReport r;
  r.target = Field<std::string>(j, "target");
  r.config = j.value("config", json::object());
  r.probe_address = Field<uint64_t>(j, "probe_address");
  r.stop_reason = Field<std::string>(j, "stop_reason");
  r.seconds = Field<double>(j, "seconds");
  r.paths = Field<size_t>(j, "P");
  r.bug_count = Field<size_t>(j, "B");
  r.execs = Field<uint64_t>(j, "E");
  r.learn_success = Field<uint64_t>(j, "S_L");
  r.learn_fail = Field<uint64_t>(j, "F_L");
  const json rate = Field<json>(j, "R_L");
  if (!rate.is_null()) r.learn_rate = rate.get<double>();
  for (const json& p : Field<json>(j, "coverage_series")) {
    r.coverage.push_back({Field<double>(p, "seconds"), Field<uint64_t>(p, "execs"),
                          Field<size_t>(p, "paths")});
  }
  for (const json& b : Field<json>(j, "bugs")) {
    auto kind = BugKindFromName(Field<std::string>(b, "kind"));
    if (!kind) throw ReportError("unknown bug kind in report");
    r.bugs.push_back({Field<uint64_t>(b, "id"), *kind, Field<SiteId>(b, "site"),
                      Field<double>(b, "seconds"), Field<uint64_t>(b, "execs"),
                      Field<json>(b, "witness")});
  }
  for (const json& e : Field<json>(j, "corpus")) {
    r.corpus.push_back({Field<std::string>(e, "path_id"), Field<json>(e, "input"),
                        Field<uint64_t>(e, "execs"), Field<double>(e, "seconds")});
  }
  return r;
}

CampaignReport LoadReport(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ReportError("cannot open " + file.string() + ": " + std::strerror(errno));
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ReportError(file.string() + ": " + e.what());
  }
  return ReportFromJson(j);
}

std::string CoverageCsv(const CampaignReport& r) {
  std::string out = "seconds,execs,paths\n";
  for (const CoveragePoint& p : r.coverage) {
    out += FormatSeconds(p.seconds) + "," + std::to_string(p.execs) + "," +
           std::to_string(p.paths) + "\n";
  }
  return out;
}

std::string BugsCsv(const CampaignReport& r) {
  std::string out = "bug_id,kind,site,seconds,execs\n";
  for (const ReportBug& b : r.bugs) {
    out += std::to_string(b.id) + "," + std::string(BugKindName(b.kind)) + "," +
           std::to_string(b.site) + "," + FormatSeconds(b.seconds) + "," +
           std::to_string(b.execs) + "\n";
  }
  return out;
}

void EmitReport(const CampaignReport& report, const std::vector<Event>& events,
                const fs::path& out_dir) {
  const fs::path suite = out_dir / "testsuite";
  std::error_code ec;
  fs::create_directories(suite, ec);
  if (ec) throw ReportError("cannot create " + suite.string() + ": " + ec.message());

  WriteFile(out_dir / "report.json", ReportToJson(report).dump(2) + "\n");
  WriteFile(out_dir / "coverage.csv", CoverageCsv(report));
  WriteFile(out_dir / "bugs.csv", BugsCsv(report));
  WriteFile(out_dir / "events.jsonl", EventLogToJsonLines(events));
  for (size_t i = 0; i < report.corpus.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "%04zu_%s.json", i + 1,
                  report.corpus[i].path_id.c_str());
    WriteFile(suite / name, report.corpus[i].input.dump(2) + "\n");
  }
}

}  // namespace lfuzz
