#include "cascade/characterize.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

#include "cascade/errors.hpp"
#include "cascade/events.hpp"
#include "cascade/logging.hpp"
#include "cascade/timeparse.hpp"

namespace cascade {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string to_lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string id_field(const ordered_json& obj, const char* key) {
    const auto& v = obj.at(key);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    throw ParseError(std::string("field '") + key + "' must be a string or integer");
}

std::vector<std::string> string_list(const ordered_json& obj, const char* key) {
    std::vector<std::string> out;
    if (!obj.contains(key)) return out;
    for (const auto& v : obj.at(key)) out.push_back(v.get<std::string>());
    return out;
}

// Numeric-string order so "9" < "10"; falls back to lexicographic.
bool user_id_less(const std::string& a, const std::string& b) {
    const bool na = !a.empty() && a.find_first_not_of("0123456789") == std::string::npos;
    const bool nb = !b.empty() && b.find_first_not_of("0123456789") == std::string::npos;
    if (na && nb) {
        if (a.size() != b.size()) return a.size() < b.size();
    }
    return a < b;
}

} // namespace

std::vector<TweetRecord> read_tweets(std::istream& in, const std::string& name) {
    std::vector<TweetRecord> tweets;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        try {
            const auto obj = ordered_json::parse(line);
            TweetRecord t;
            t.user_id = id_field(obj, "user_id");
            t.timestamp = timeutil::parse_iso8601(obj.at("timestamp").get<std::string>());
            if (obj.contains("text")) t.text = obj.at("text").get<std::string>();
            if (obj.contains("language")) t.language = obj.at("language").get<std::string>();
            if (obj.contains("client")) t.client = obj.at("client").get<std::string>();
            if (obj.contains("screen_name"))
                t.screen_name = obj.at("screen_name").get<std::string>();
            if (obj.contains("description"))
                t.description = obj.at("description").get<std::string>();
            if (obj.contains("location")) t.location = obj.at("location").get<std::string>();
            if (obj.contains("timezone")) t.timezone = obj.at("timezone").get<std::string>();
            t.hashtags = string_list(obj, "hashtags");
            t.mentions = string_list(obj, "mentions");
            t.urls = string_list(obj, "urls");
            if (obj.contains("followers_count"))
                t.followers_count = obj.at("followers_count").get<std::int64_t>();
            if (obj.contains("friends_count"))
                t.friends_count = obj.at("friends_count").get<std::int64_t>();
            if (obj.contains("statuses_count"))
                t.statuses_count = obj.at("statuses_count").get<std::int64_t>();
            if (obj.contains("media_count_image"))
                t.media_count_image = obj.at("media_count_image").get<std::int64_t>();
            if (obj.contains("has_video")) t.has_video = obj.at("has_video").get<bool>();
            if (obj.contains("account_created_at"))
                t.account_created_at =
                    timeutil::parse_iso8601(obj.at("account_created_at").get<std::string>());
            if (obj.contains("sentiment")) t.sentiment = obj.at("sentiment").get<double>();
            if (obj.contains("subjectivity"))
                t.subjectivity = obj.at("subjectivity").get<double>();
            if (t.followers_count < 0 || t.friends_count < 0 || t.statuses_count < 0 ||
                t.media_count_image < 0)
                throw ParseError("negative count");
            tweets.push_back(std::move(t));
        } catch (const ParseError& e) {
            throw ParseError(name + ":" + std::to_string(lineno) + ": " + e.what());
        } catch (const std::exception& e) {
            throw ParseError(name + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return tweets;
}

std::vector<AccountRecord> build_accounts(const std::vector<TweetRecord>& tweets) {
    std::map<std::string, std::vector<std::size_t>, decltype(&user_id_less)> by_user(
        &user_id_less);
    for (std::size_t i = 0; i < tweets.size(); ++i) by_user[tweets[i].user_id].push_back(i);

    std::vector<AccountRecord> accounts;
    accounts.reserve(by_user.size());
    for (auto& [uid, idx] : by_user) {
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return tweets[a].timestamp < tweets[b].timestamp;
        });
        AccountRecord acc;
        acc.user_id = uid;
        acc.tweet_idx = std::move(idx);
        for (const std::size_t i : acc.tweet_idx) {
            if (!acc.created_at && tweets[i].account_created_at)
                acc.created_at = tweets[i].account_created_at;
            const std::string& sn = tweets[i].screen_name;
            if (sn.empty()) continue;
            if (acc.screen_names.empty() || acc.screen_names.back().first != sn)
                acc.screen_names.emplace_back(sn, tweets[i].timestamp);
        }
        accounts.push_back(std::move(acc));
    }
    return accounts;
}

TemporalHistograms temporal_histograms(const std::vector<TweetRecord>& tweets) {
    if (tweets.empty())
        throw std::invalid_argument("temporal_histograms: empty archive");
    TemporalHistograms h;
    for (const auto& t : tweets) {
        h.hour_of_day[static_cast<std::size_t>(timeutil::hour_of_day(t.timestamp))] += 1.0;
        h.hour_of_week[static_cast<std::size_t>(timeutil::hour_of_week(t.timestamp))] += 1.0;
    }
    const double inv = 1.0 / static_cast<double>(tweets.size());
    for (double& v : h.hour_of_day) v *= inv;
    for (double& v : h.hour_of_week) v *= inv;
    return h;
}

std::vector<std::pair<std::string, std::size_t>> creation_timeline(
    const std::vector<AccountRecord>& accounts) {
    std::map<std::string, std::size_t> per_day;
    for (const auto& acc : accounts)
        if (acc.created_at) ++per_day[timeutil::format_date(*acc.created_at)];
    return {per_day.begin(), per_day.end()};
}

namespace {

std::vector<std::string> words_of(const std::string& text) {
    std::vector<std::string> words;
    std::string cur;
    for (const char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!cur.empty()) {
            words.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) words.push_back(std::move(cur));
    return words;
}

std::set<std::string> tokens_of(const std::string& input, NgramMode mode) {
    std::set<std::string> tokens;
    switch (mode) {
        case NgramMode::Word:
            for (auto& w : words_of(input)) tokens.insert(std::move(w));
            break;
        case NgramMode::Char4: {
            const std::string low = to_lower(input);
            for (std::size_t i = 0; i + 4 <= low.size(); ++i)
                tokens.insert(low.substr(i, 4));
            break;
        }
        case NgramMode::WordBigram: {
            const auto words = words_of(input);
            for (std::size_t i = 0; i + 1 < words.size(); ++i)
                tokens.insert(words[i] + " " + words[i + 1]);
            break;
        }
    }
    return tokens;
}

std::vector<std::pair<std::string, double>> rank_shares(
    const std::map<std::string, std::size_t>& counts, std::size_t denominator,
    std::size_t n) {
    std::vector<std::pair<std::string, std::size_t>> items(counts.begin(), counts.end());
    // descending count; the map already yields lexicographic order for ties
    std::stable_sort(items.begin(), items.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (items.size() > n) items.resize(n);
    std::vector<std::pair<std::string, double>> out;
    out.reserve(items.size());
    for (auto& [token, count] : items)
        out.emplace_back(std::move(token),
                         100.0 * static_cast<double>(count) /
                             static_cast<double>(denominator));
    return out;
}

} // namespace

std::vector<std::pair<std::string, double>> top_ngrams(
    const std::vector<std::string>& inputs, NgramMode mode, std::size_t n) {
    if (n == 0) throw std::invalid_argument("top_ngrams: n must be >= 1");
    if (inputs.empty()) return {};
    std::map<std::string, std::size_t> counts;
    for (const auto& input : inputs)
        for (const auto& token : tokens_of(input, mode)) ++counts[token];
    return rank_shares(counts, inputs.size(), n);
}

namespace {

std::set<std::string> items_of(const TweetRecord& t, TweetField field) {
    std::set<std::string> items;
    switch (field) {
        case TweetField::Hashtag:
            for (const auto& h : t.hashtags)
                if (!h.empty()) items.insert(to_lower(h));
            break;
        case TweetField::Mention:
            for (const auto& m : t.mentions)
                if (!m.empty()) items.insert(to_lower(m));
            break;
        case TweetField::Domain: {
            static const RedirectMap no_redirects;
            static const DomainCategorizer no_domains({}, {});
            for (const auto& u : t.urls) {
                if (u.empty()) continue;
                try {
                    items.insert(host_of_canonical(
                        canonicalize_url(u, no_redirects, no_domains).canonical));
                } catch (const ParseError&) {
                    // junk URLs don't sink the table
                }
            }
            break;
        }
        case TweetField::Client:
            if (!t.client.empty()) items.insert(t.client);
            break;
        case TweetField::Language:
            if (!t.language.empty()) items.insert(t.language);
            break;
        case TweetField::Timezone:
            if (!t.timezone.empty()) items.insert(t.timezone);
            break;
    }
    return items;
}

} // namespace

std::vector<std::pair<std::string, double>> top_items(
    const std::vector<TweetRecord>& tweets, TweetField field, std::size_t n) {
    if (n == 0) throw std::invalid_argument("top_items: n must be >= 1");
    if (tweets.empty()) return {};
    std::map<std::string, std::size_t> counts;
    for (const auto& t : tweets)
        for (const auto& item : items_of(t, field)) ++counts[item];
    return rank_shares(counts, tweets.size(), n);
}

std::vector<double> per_user_diversity(const std::vector<TweetRecord>& tweets,
                                       TweetField field) {
    std::map<std::string, std::set<std::string>, decltype(&user_id_less)> per_user(
        &user_id_less);
    for (const auto& t : tweets) {
        auto& bucket = per_user[t.user_id];
        for (const auto& item : items_of(t, field)) bucket.insert(item);
    }
    std::vector<double> counts;
    counts.reserve(per_user.size());
    for (const auto& [uid, items] : per_user)
        counts.push_back(static_cast<double>(items.size()));
    return counts;
}

Growth follower_growth(const AccountRecord& account,
                       const std::vector<TweetRecord>& tweets) {
    Growth g;
    if (account.tweet_idx.empty()) return g;
    const TweetRecord& first = tweets.at(account.tweet_idx.front());
    const TweetRecord& last = tweets.at(account.tweet_idx.back());
    g.d_followers = last.followers_count - first.followers_count;
    g.d_friends = last.friends_count - first.friends_count;
    return g;
}

NameHistory screen_name_changes(const AccountRecord& account) {
    NameHistory h;
    h.names.reserve(account.screen_names.size());
    for (const auto& [name, first_seen] : account.screen_names) h.names.push_back(name);
    h.changes = h.names.empty() ? 0 : h.names.size() - 1;
    return h;
}

AccountDeletions observed_deletions(const AccountRecord& account,
                                    const std::vector<TweetRecord>& tweets) {
    AccountDeletions del;
    std::int64_t total = 0, peak = 0;
    for (std::size_t i = 0; i < account.tweet_idx.size(); ++i) {
        const TweetRecord& cur = tweets.at(account.tweet_idx[i]);
        peak = std::max(peak, cur.statuses_count);
        if (i == 0) continue;
        const TweetRecord& prev = tweets.at(account.tweet_idx[i - 1]);
        const std::int64_t dropped = prev.statuses_count + 1 - cur.statuses_count;
        if (dropped > 0) {
            del.observations.push_back(
                DeletionObservation{prev.timestamp, cur.timestamp, dropped});
            total += dropped;
        }
    }
    del.fraction = peak > 0 ? static_cast<double>(total) / static_cast<double>(peak) : 0.0;
    return del;
}

std::vector<std::pair<std::string, double>> monthly_deletions(
    const std::vector<AccountRecord>& accounts, const std::vector<TweetRecord>& tweets) {
    std::map<std::string, std::pair<double, std::size_t>> buckets;  // sum, count
    for (const auto& acc : accounts) {
        std::int64_t peak = 0;
        for (const std::size_t i : acc.tweet_idx)
            peak = std::max(peak, tweets.at(i).statuses_count);
        if (peak == 0) continue;
        for (const auto& obs : observed_deletions(acc, tweets).observations) {
            auto& [sum, count] = buckets[timeutil::format_month(obs.end)];
            sum += 100.0 * static_cast<double>(obs.min_deleted) /
                   static_cast<double>(peak);
            count += 1;
        }
    }
    std::vector<std::pair<std::string, double>> out;
    out.reserve(buckets.size());
    for (const auto& [month, agg] : buckets)
        out.emplace_back(month, agg.first / static_cast<double>(agg.second));
    return out;
}

std::optional<double> tweet_rate(const AccountRecord& account,
                                 const std::vector<TweetRecord>& tweets) {
    if (!account.created_at || account.tweet_idx.empty()) return std::nullopt;
    const TweetRecord& first = tweets.at(account.tweet_idx.front());
    const double days = (first.timestamp - *account.created_at) / 86400.0;
    // an account observed within its first hour still gets a finite rate
    return static_cast<double>(first.statuses_count) / std::max(days, 1.0 / 24.0);
}

std::vector<std::size_t> baseline_match(const std::vector<AccountRecord>& candidates,
                                        const std::vector<TweetRecord>& tweets,
                                        const std::vector<double>& reference_rates,
                                        std::size_t size) {
    if (reference_rates.empty())
        throw std::invalid_argument("baseline_match: empty reference");
    struct Entry {
        double rate;
        std::size_t index;
    };
    std::vector<Entry> pool;
    for (std::size_t i = 0; i < candidates.size(); ++i)
        if (const auto rate = tweet_rate(candidates[i], tweets))
            pool.push_back(Entry{*rate, i});
    if (size > pool.size())
        throw std::invalid_argument("baseline_match: not enough rated candidates (" +
                                    std::to_string(pool.size()) + " < " +
                                    std::to_string(size) + ")");
    if (pool.size() < candidates.size())
        logging::warn("baseline_match: skipped " +
                      std::to_string(candidates.size() - pool.size()) +
                      " candidates without a creation date");

    std::vector<double> ref = reference_rates;
    std::sort(ref.begin(), ref.end());

    std::vector<char> used(pool.size(), 0);
    std::vector<std::size_t> selected;
    selected.reserve(size);
    for (std::size_t i = 0; i < size; ++i) {
        const double q = (static_cast<double>(i) + 0.5) / static_cast<double>(size);
        const auto idx = std::min(ref.size() - 1,
                                  static_cast<std::size_t>(q * static_cast<double>(ref.size())));
        const double target = ref[idx];

        std::size_t best = pool.size();
        for (std::size_t c = 0; c < pool.size(); ++c) {
            if (used[c]) continue;
            if (best == pool.size()) {
                best = c;
                continue;
            }
            const double dc = std::fabs(pool[c].rate - target);
            const double db = std::fabs(pool[best].rate - target);
            if (dc < db ||
                (dc == db && user_id_less(candidates[pool[c].index].user_id,
                                          candidates[pool[best].index].user_id)))
                best = c;
        }
        used[best] = 1;
        selected.push_back(pool[best].index);
    }
    return selected;
}

std::vector<double> collect_scores(const std::vector<TweetRecord>& tweets,
                                   ScoreField field) {
    std::vector<double> out;
    for (const auto& t : tweets) {
        const auto& v = field == ScoreField::Sentiment ? t.sentiment : t.subjectivity;
        if (v) out.push_back(*v);
    }
    return out;
}

} // namespace cascade
