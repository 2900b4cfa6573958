// Campaign reports: report.json, coverage.csv, bugs.csv, events.jsonl and a
// testsuite/ directory with one input file per discovered path.
#ifndef LFUZZ_REPORT_H_
#define LFUZZ_REPORT_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "lfuzz/campaign.h"
#include "lfuzz/detectors.h"

namespace lfuzz {

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ReportBug {
  uint64_t id = 0;  // 1-based, in discovery order
  BugKind kind = BugKind::kAssertionViolation;
  SiteId site = 0;
  double seconds = 0;
  uint64_t execs = 0;
  nlohmann::json witness;
};

struct ReportEntry {
  std::string path_id;  // hex
  nlohmann::json input;
  uint64_t execs = 0;
  double seconds = 0;
};

struct CampaignReport {
  // Target as given on the command line: a file path or "builtin:NAME".
  std::string target;
  nlohmann::json config;
  uint64_t probe_address = 0;
  std::string stop_reason;
  double seconds = 0;

  size_t paths = 0;         // P
  size_t bug_count = 0;     // B
  uint64_t execs = 0;       // E
  uint64_t learn_success = 0;  // S_L
  uint64_t learn_fail = 0;     // F_L
  std::optional<double> learn_rate;  // R_L

  std::vector<CoveragePoint> coverage;
  std::vector<ReportBug> bugs;
  std::vector<ReportEntry> corpus;
};

nlohmann::json CampaignConfigToJson(const CampaignConfig& cfg);

CampaignReport MakeReport(const TargetProgram& prog, const std::string& target,
                          const CampaignConfig& cfg, const CampaignResult& result);

nlohmann::json ReportToJson(const CampaignReport& report);
// Throws ReportError on missing or mistyped fields.
CampaignReport ReportFromJson(const nlohmann::json& j);

CampaignReport LoadReport(const std::filesystem::path& file);

// Writes all report files into out_dir (created if missing). Throws
// ReportError naming the offending path on filesystem errors.
void EmitReport(const CampaignReport& report, const std::vector<Event>& events,
                const std::filesystem::path& out_dir);

std::string CoverageCsv(const CampaignReport& report);
std::string BugsCsv(const CampaignReport& report);

}  // namespace lfuzz

#endif  // LFUZZ_REPORT_H_
