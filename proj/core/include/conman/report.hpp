#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "conman/chain.hpp"
#include "conman/cluster.hpp"
#include "conman/csv.hpp"
#include "conman/embed.hpp"
#include "conman/engagement.hpp"
#include "conman/ingest.hpp"
#include "conman/model.hpp"

namespace conman {

// 100 * num / den rounded half-up to two decimals, from integers so the
// printed value never depends on floating point. den == 0 gives "0.00".
std::string pct_string(std::uint64_t num, std::uint64_t den);
double pct_value(std::uint64_t num, std::uint64_t den);
// Unrounded 100 * num / den.
double ratio_pct(std::uint64_t num, std::uint64_t den);

struct EfficacyRow {
  std::string platform;
  std::size_t total = 0;
  std::size_t blocked = 0;
  double blocked_pct = 0;  // rounded half-up to 2 decimals
};

// Form provider from the form URL's host: "Google Forms", "JotForm" or "Other".
std::string form_provider(std::string_view identifier);

// Latest probe per (kind, identifier) decides; later input wins ties. Only a
// Blocked outcome counts as blocked. Rows, in order: Email, Forms, Instagram,
// Telegram, Twitter, WhatsApp, All. A channel platform without probes is
// omitted. Twitter is the suspended share of accounts; All covers channel
// probes only and is present whenever any other row is.
std::vector<EfficacyRow> blocking_table(std::span<const ProbeResult> probes,
                                        std::span<const ScamAccount> accounts);

struct LifespanPoint {
  int day = 0;
  std::size_t suspended = 0;
  std::size_t deactivated = 0;
  std::size_t accounts = 0;
  double suspended_pct = 0;
  double deactivated_pct = 0;
};

// Cumulative share of accounts whose terminal status came within `day` whole
// days of their first interaction. Runs from day 0 through the later of
// min_days and the last terminal day. Throws ReportError for an account with
// no interaction or a terminal status before its first interaction.
std::vector<LifespanPoint> lifespan_curves(std::span<const ScamAccount> accounts,
                                           const std::map<AccountId, Timestamp>& first_interaction,
                                           int min_days = 90);

struct FormBlockingRow {
  std::string provider;
  std::string wallet;  // wallet name, "Unattributed" or "All"
  std::size_t total = 0;
  std::size_t blocked = 0;
};

// Form probes split by provider and then attributed wallet; each provider
// ends with its "All" row.
std::vector<FormBlockingRow> form_blocking_breakdown(std::span<const ProbeResult> probes);

struct ReportInputs {
  std::vector<ScamAccount> accounts;
  std::vector<Interaction> interactions;
  std::vector<ContactChannel> honey_channels;
  std::vector<ContactChannel> all_channels;
  std::vector<ChannelCluster> clusters;
  std::vector<CampaignGroup> groups;
  std::vector<EngagementRow> profile_clusters;
  std::vector<ProbeResult> probes;
  std::optional<TheftReport> theft;
  std::vector<AddressSummary> btc_addresses;
  std::vector<ActivityPoint> btc_series;
  std::optional<EngagementSummary> engagement;
  std::vector<AccountVerdict> verdicts;
  int lifespan_days = 90;
};

// Throws ReportError naming the first record that points at something missing.
void check_consistency(const ReportInputs& in);

struct NamedTable {
  std::string name;  // file stem, e.g. "table1_interactions"
  CsvTable table;
};

std::vector<NamedTable> build_tables(const ReportInputs& in);
std::string render_summary(const ReportInputs& in, std::span<const NamedTable> tables);

enum class ReportFormat { Csv, Json, Markdown };
ReportFormat parse_report_format(std::string_view s);
std::string_view extension(ReportFormat f);

std::string render_table(const CsvTable& t, ReportFormat f);
CsvTable parse_table(const std::string& text, ReportFormat f);

struct AuditResult {
  std::size_t checked = 0;
  std::vector<std::string> problems;

  bool ok() const { return problems.empty(); }
};

// Recomputes every percentage cell from the count cells of the same bundle
// and checks total rows against the rows above them.
AuditResult audit_tables(std::span<const NamedTable> tables);
// Loads every table file (any of the three formats) from a report directory.
std::vector<NamedTable> load_bundle(const std::filesystem::path& dir);
AuditResult audit_bundle(const std::filesystem::path& dir);

// Writes one file per table plus summary.md; audits first and throws
// ReportError when the tables are not self-consistent. Returns written paths.
std::vector<std::filesystem::path> emit_report(const ReportInputs& in,
                                               const std::filesystem::path& dir,
                                               ReportFormat format = ReportFormat::Csv);

}  // namespace conman
