#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace cascade {

// The monitored communities. Indices are dense and stable for a run.
class GroupSet {
public:
    explicit GroupSet(std::vector<std::string> labels);

    [[nodiscard]] std::size_t size() const { return labels_.size(); }
    [[nodiscard]] const std::string& label(std::size_t k) const { return labels_.at(k); }
    [[nodiscard]] const std::vector<std::string>& labels() const { return labels_; }
    [[nodiscard]] std::optional<std::size_t> find(std::string_view label) const;
    // Like find(), but an unknown label throws a ParseError listing the
    // permitted labels.
    [[nodiscard]] std::size_t require(std::string_view label) const;

private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, std::size_t> index_;
};

enum class UrlCategory { RussianState, OtherNews, Other };

[[nodiscard]] std::string_view category_name(UrlCategory c);
[[nodiscard]] UrlCategory category_from_name(std::string_view name);

struct Event {
    std::size_t group = 0;
    double t = 0.0;         // hours since sequence origin
    std::string source_id;  // post id, may be empty
    int parent = kParentUntracked;  // simulator bookkeeping, see below

    static constexpr int kParentUntracked = -2;
    static constexpr int kParentBackground = -1;
};

struct EventSequence {
    std::string url;
    UrlCategory category = UrlCategory::Other;
    double window_T = 0.0;  // hours
    std::vector<Event> events;
};

struct UrlRecord {
    std::string raw;
    std::string canonical;
    UrlCategory category = UrlCategory::Other;
};

// Offline replacement for following shortener redirects: canonical URL or
// bare host on the left, target URL on the right. Applied repeatedly until
// a fixed point (bounded depth; cycles are a parse error).
class RedirectMap {
public:
    RedirectMap() = default;
    void add(const std::string& source, const std::string& target);
    [[nodiscard]] const std::string* lookup(const std::string& canonical_url,
                                            const std::string& host) const;
    [[nodiscard]] std::size_t size() const { return map_.size(); }

    static RedirectMap load(std::istream& in, const std::string& name);

private:
    std::unordered_map<std::string, std::string> map_;
};

// Host sets for URL categorization; matching is by exact host or any
// parent-domain suffix ("a.rt.com" matches "rt.com" but "xrt.com" does not).
class DomainCategorizer {
public:
    DomainCategorizer(std::unordered_set<std::string> state_domains,
                      std::unordered_set<std::string> news_domains);

    [[nodiscard]] UrlCategory categorize_host(const std::string& host) const;

    static std::unordered_set<std::string> load_hosts(std::istream& in,
                                                      const std::string& name);

private:
    std::unordered_set<std::string> state_;
    std::unordered_set<std::string> news_;
};

// Scheme- and fragment-stripped, host lowercased, path trailing slashes
// removed, query preserved. Idempotent, including through the redirect map.
[[nodiscard]] UrlRecord canonicalize_url(const std::string& raw,
                                         const RedirectMap& redirects,
                                         const DomainCategorizer& categorizer);

// Host component of a canonical URL (authority minus any :port).
[[nodiscard]] std::string host_of_canonical(const std::string& canonical);

// One ingested archive row before grouping.
struct EventRow {
    std::string url;
    std::string group;
    double abs_hours = 0.0;  // absolute time, hours since epoch
    std::string source_id;
};

// Rows as line-JSON {"url","group","timestamp","source_id"?} or
// tab-delimited url<TAB>group<TAB>timestamp[<TAB>source_id]; the format is
// detected from the first non-empty line. Timestamps are ISO-8601 and are
// converted to model time units (default hours).
[[nodiscard]] std::vector<EventRow> read_event_rows(std::istream& in,
                                                    const std::string& name,
                                                    double seconds_per_unit = 3600.0);

struct SequenceBuildOptions {
    std::optional<double> global_horizon;  // hours; unset = per-URL window
    double horizon_padding = 24.0;         // hours beyond the last event
    std::size_t min_total_events = 1;
};

// Groups rows by canonical URL, deduplicates exact repeats, rebases times so
// each sequence starts at 0, and filters by minimum event count. Output is
// ordered by canonical URL.
[[nodiscard]] std::vector<EventSequence> build_sequences(
    const std::vector<EventRow>& rows, const GroupSet& groups,
    const RedirectMap& redirects, const DomainCategorizer& categorizer,
    const SequenceBuildOptions& options);

// URL and event tallies per category x group for the corpus summary
// table; background rates are filled in after fitting.
struct CountsSummary {
    static constexpr std::size_t kCategories = 3;  // RussianState, OtherNews, All
    std::size_t n_groups = 0;
    // indexed [category][group]; category 2 == All
    std::vector<std::vector<std::size_t>> urls;
    std::vector<std::vector<std::size_t>> events;
    std::vector<std::vector<std::optional<double>>> mean_lambda0;

    [[nodiscard]] static std::size_t category_row(UrlCategory c);
    [[nodiscard]] static std::string_view category_row_name(std::size_t row);
};

[[nodiscard]] CountsSummary counts_summary(const std::vector<EventSequence>& sequences,
                                           const GroupSet& groups);

// Tab-separated summary: metric, category, then one column per group.
void write_counts_summary(std::ostream& out, const CountsSummary& summary,
                          const GroupSet& groups);

// Sequence bundles: one JSON object per line,
// {"url","category","window","events":[{"g","t","id"?,"p"?}]}.
void write_bundle(std::ostream& out, const std::vector<EventSequence>& sequences,
                  const GroupSet& groups);
[[nodiscard]] std::vector<EventSequence> read_bundle(std::istream& in,
                                                     const GroupSet& groups,
                                                     const std::string& name);

} // namespace cascade
