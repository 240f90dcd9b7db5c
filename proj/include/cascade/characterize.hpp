#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cascade {

// One archived tweet, flat line-JSON. Only user_id and timestamp are
// mandatory; everything else defaults to empty/zero. sentiment and
// subjectivity are precomputed scores supplied by the producer of the
// archive, never computed here.
struct TweetRecord {
    std::string user_id;
    double timestamp = 0.0;  // epoch seconds, UTC
    std::string text;
    std::string language;
    std::string client;
    std::string screen_name;
    std::string description;
    std::string location;
    std::string timezone;
    std::vector<std::string> hashtags;
    std::vector<std::string> mentions;
    std::vector<std::string> urls;
    std::int64_t followers_count = 0;
    std::int64_t friends_count = 0;
    std::int64_t statuses_count = 0;
    std::int64_t media_count_image = 0;
    bool has_video = false;
    std::optional<double> account_created_at;  // epoch seconds
    std::optional<double> sentiment;
    std::optional<double> subjectivity;
};

[[nodiscard]] std::vector<TweetRecord> read_tweets(std::istream& in,
                                                   const std::string& name);

// Per-account view over a tweet archive; tweet indices are time-ordered.
struct AccountRecord {
    std::string user_id;
    std::optional<double> created_at;  // epoch seconds
    std::vector<std::size_t> tweet_idx;
    // run-compressed screen-name history with first-seen times
    std::vector<std::pair<std::string, double>> screen_names;
};

[[nodiscard]] std::vector<AccountRecord> build_accounts(
    const std::vector<TweetRecord>& tweets);

struct TemporalHistograms {
    std::array<double, 24> hour_of_day{};
    std::array<double, 168> hour_of_week{};  // Monday 00:00 == bin 0
};

// Normalized activity histograms; throws on an empty archive.
[[nodiscard]] TemporalHistograms temporal_histograms(
    const std::vector<TweetRecord>& tweets);

// (YYYY-MM-DD, accounts created that UTC day), ascending; zero days omitted.
// Accounts with no known creation date are skipped.
[[nodiscard]] std::vector<std::pair<std::string, std::size_t>> creation_timeline(
    const std::vector<AccountRecord>& accounts);

enum class NgramMode { Word, Char4, WordBigram };

// Ranked (token, percent of inputs containing it); lowercase folded, ranked
// by share descending with lexicographic tie-break.
[[nodiscard]] std::vector<std::pair<std::string, double>> top_ngrams(
    const std::vector<std::string>& inputs, NgramMode mode, std::size_t n);

enum class TweetField { Hashtag, Mention, Domain, Client, Language, Timezone };

// Ranked (item, percent of tweets carrying it); an item counts once per
// tweet however often it repeats within one.
[[nodiscard]] std::vector<std::pair<std::string, double>> top_items(
    const std::vector<TweetRecord>& tweets, TweetField field, std::size_t n);

// Distinct values of a field per user, ordered by user id; ECDF input.
[[nodiscard]] std::vector<double> per_user_diversity(
    const std::vector<TweetRecord>& tweets, TweetField field);

struct Growth {
    std::int64_t d_followers = 0;
    std::int64_t d_friends = 0;
};

// First-to-last tweet change in follower/friend counts.
[[nodiscard]] Growth follower_growth(const AccountRecord& account,
                                     const std::vector<TweetRecord>& tweets);

struct NameHistory {
    std::vector<std::string> names;  // run-compressed, in order of use
    std::size_t changes = 0;
};

[[nodiscard]] NameHistory screen_name_changes(const AccountRecord& account);

// Conservative deletion bound between consecutive tweets: posting one tweet
// raises the authored-post counter by one, so counts c_i, c_{i+1} imply at
// least c_i + 1 - c_{i+1} deletions when that is positive.
struct DeletionObservation {
    double start = 0.0;  // epoch seconds of the earlier tweet
    double end = 0.0;    // epoch seconds of the later tweet
    std::int64_t min_deleted = 0;
};

struct AccountDeletions {
    std::vector<DeletionObservation> observations;
    double fraction = 0.0;  // sum of min_deleted over the peak statuses_count
};

[[nodiscard]] AccountDeletions observed_deletions(const AccountRecord& account,
                                                  const std::vector<TweetRecord>& tweets);

// (YYYY-MM, mean per-observation deletion percentage), bucketed by the UTC
// month of each observation interval's end.
[[nodiscard]] std::vector<std::pair<std::string, double>> monthly_deletions(
    const std::vector<AccountRecord>& accounts, const std::vector<TweetRecord>& tweets);

// Average tweets per day over the account's lifetime at its first observed
// tweet; accounts need a creation date. Used for cohort matching.
[[nodiscard]] std::optional<double> tweet_rate(const AccountRecord& account,
                                               const std::vector<TweetRecord>& tweets);

// Greedy quantile matching: pick `size` candidates whose tweet-rate
// distribution tracks the reference rates. Returns indices into candidates.
[[nodiscard]] std::vector<std::size_t> baseline_match(
    const std::vector<AccountRecord>& candidates, const std::vector<TweetRecord>& tweets,
    const std::vector<double>& reference_rates, std::size_t size);

enum class ScoreField { Sentiment, Subjectivity };

// Precomputed per-tweet scores present in the archive, in input order.
[[nodiscard]] std::vector<double> collect_scores(const std::vector<TweetRecord>& tweets,
                                                 ScoreField field);

} // namespace cascade
