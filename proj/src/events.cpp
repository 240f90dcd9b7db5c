#include "cascade/events.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "cascade/errors.hpp"
#include "cascade/logging.hpp"
#include "cascade/timeparse.hpp"

namespace cascade {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

[[noreturn]] void bad_url(const std::string& raw, const char* why) {
    throw ParseError(std::string("malformed URL (") + why + "): '" + raw + "'");
}

// Normalization without the redirect map; throws ParseError on junk.
std::string canonical_core(const std::string& raw) {
    const std::string s = trim(raw);
    if (s.empty()) bad_url(raw, "empty");

    std::size_t start = 0;
    if (std::isalpha(static_cast<unsigned char>(s[0]))) {
        std::size_t i = 1;
        while (i < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '+' ||
                s[i] == '-' || s[i] == '.'))
            ++i;
        if (s.compare(i, 3, "://") == 0) start = i + 3;
    } else if (s.rfind("//", 0) == 0) {
        start = 2;  // protocol-relative
    }

    std::string_view rest(s.data() + start, s.size() - start);
    if (const auto h = rest.find('#'); h != std::string_view::npos)
        rest = rest.substr(0, h);

    const auto auth_end = rest.find_first_of("/?");
    std::string_view authority =
        rest.substr(0, auth_end == std::string_view::npos ? rest.size() : auth_end);
    const std::string_view tail =
        auth_end == std::string_view::npos ? std::string_view{} : rest.substr(auth_end);

    if (const auto at = authority.rfind('@'); at != std::string_view::npos)
        authority = authority.substr(at + 1);
    if (authority.empty()) bad_url(raw, "no host");

    std::string host;
    host.reserve(authority.size());
    bool has_alnum = false;
    for (const char c : authority) {
        const auto uc = static_cast<unsigned char>(c);
        if (std::isalnum(uc)) {
            has_alnum = true;
            host.push_back(static_cast<char>(std::tolower(uc)));
        } else if (c == '-' || c == '.' || c == '_' || c == ':') {
            host.push_back(c);
        } else {
            bad_url(raw, "bad character in host");
        }
    }
    if (!has_alnum) bad_url(raw, "no host");
    if (const auto colon = host.find(':'); colon != std::string::npos) {
        if (colon == 0) bad_url(raw, "empty host before port");
        const std::string_view port(host.data() + colon + 1, host.size() - colon - 1);
        if (port.empty()) bad_url(raw, "empty port");
        for (const char c : port)
            if (!std::isdigit(static_cast<unsigned char>(c))) bad_url(raw, "bad port");
    }

    std::string path, query;
    bool has_query = false;
    if (!tail.empty()) {
        const auto q = tail.find('?');
        path = std::string(tail.substr(0, q));
        if (q != std::string_view::npos) {
            has_query = true;
            query = std::string(tail.substr(q + 1));
        }
    }
    while (!path.empty() && path.back() == '/') path.pop_back();

    std::string out = host + path;
    if (has_query && !query.empty()) {
        out += '?';
        out += query;
    }
    return out;
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

} // namespace

GroupSet::GroupSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.size() < 2)
        throw ConfigError("at least two group labels are required");
    for (std::size_t k = 0; k < labels_.size(); ++k) {
        if (labels_[k].empty()) throw ConfigError("empty group label");
        if (!index_.emplace(labels_[k], k).second)
            throw ConfigError("duplicate group label '" + labels_[k] + "'");
    }
}

std::optional<std::size_t> GroupSet::find(std::string_view label) const {
    const auto it = index_.find(std::string(label));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t GroupSet::require(std::string_view label) const {
    if (const auto k = find(label)) return *k;
    std::string permitted;
    for (const auto& l : labels_) {
        if (!permitted.empty()) permitted += ", ";
        permitted += l;
    }
    throw ParseError("unknown group label '" + std::string(label) +
                     "' (permitted: " + permitted + ")");
}

std::string_view category_name(UrlCategory c) {
    switch (c) {
        case UrlCategory::RussianState: return "russian_state";
        case UrlCategory::OtherNews: return "other_news";
        case UrlCategory::Other: return "other";
    }
    return "other";
}

UrlCategory category_from_name(std::string_view name) {
    if (name == "russian_state") return UrlCategory::RussianState;
    if (name == "other_news") return UrlCategory::OtherNews;
    if (name == "other") return UrlCategory::Other;
    throw ParseError("unknown URL category '" + std::string(name) + "'");
}

void RedirectMap::add(const std::string& source, const std::string& target) {
    canonical_core(target);  // validate now so errors name the map entry
    map_[canonical_core(source)] = target;
}

const std::string* RedirectMap::lookup(const std::string& canonical_url,
                                       const std::string& host) const {
    if (const auto it = map_.find(canonical_url); it != map_.end()) return &it->second;
    if (const auto it = map_.find(host); it != map_.end()) return &it->second;
    return nullptr;
}

RedirectMap RedirectMap::load(std::istream& in, const std::string& name) {
    RedirectMap m;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto ws = t.find_first_of(" \t");
        if (ws == std::string::npos)
            throw ParseError(name + ":" + std::to_string(lineno) +
                             ": expected 'source<TAB>target'");
        try {
            m.add(trim(t.substr(0, ws)), trim(t.substr(ws + 1)));
        } catch (const ParseError& e) {
            throw ParseError(name + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return m;
}

DomainCategorizer::DomainCategorizer(std::unordered_set<std::string> state_domains,
                                     std::unordered_set<std::string> news_domains)
    : state_(std::move(state_domains)), news_(std::move(news_domains)) {}

namespace {

bool host_in(const std::string& host, const std::unordered_set<std::string>& set) {
    if (set.empty()) return false;
    std::size_t pos = 0;
    while (true) {
        if (set.count(host.substr(pos))) return true;
        const auto dot = host.find('.', pos);
        if (dot == std::string::npos) return false;
        pos = dot + 1;
    }
}

} // namespace

UrlCategory DomainCategorizer::categorize_host(const std::string& host) const {
    if (host_in(host, state_)) return UrlCategory::RussianState;
    if (host_in(host, news_)) return UrlCategory::OtherNews;
    return UrlCategory::Other;
}

std::unordered_set<std::string> DomainCategorizer::load_hosts(std::istream& in,
                                                              const std::string& name) {
    std::unordered_set<std::string> hosts;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        try {
            hosts.insert(host_of_canonical(canonical_core(lower(t))));
        } catch (const ParseError& e) {
            throw ParseError(name + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return hosts;
}

std::string host_of_canonical(const std::string& canonical) {
    const auto end = canonical.find_first_of("/?");
    std::string authority =
        end == std::string::npos ? canonical : canonical.substr(0, end);
    if (const auto colon = authority.find(':'); colon != std::string::npos)
        authority.resize(colon);
    return authority;
}

UrlRecord canonicalize_url(const std::string& raw, const RedirectMap& redirects,
                           const DomainCategorizer& categorizer) {
    std::string canon = canonical_core(raw);
    std::unordered_set<std::string> seen{canon};
    for (int depth = 0;; ++depth) {
        const std::string* target = redirects.lookup(canon, host_of_canonical(canon));
        if (!target) break;
        std::string next = canonical_core(*target);
        if (next == canon) break;
        if (depth >= 16)
            throw ParseError("redirect chain too deep for '" + raw + "'");
        if (!seen.insert(next).second)
            throw ParseError("redirect cycle for '" + raw + "'");
        canon = std::move(next);
    }
    return UrlRecord{raw, canon, categorizer.categorize_host(host_of_canonical(canon))};
}

namespace {

std::string json_string_field(const ordered_json& obj, const char* key) {
    const auto& v = obj.at(key);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    throw ParseError(std::string("field '") + key + "' must be a string");
}

EventRow row_from_json(const std::string& line, double seconds_per_unit) {
    const auto obj = ordered_json::parse(line);
    EventRow row;
    row.url = json_string_field(obj, "url");
    row.group = json_string_field(obj, "group");
    row.abs_hours =
        timeutil::parse_iso8601(json_string_field(obj, "timestamp")) / seconds_per_unit;
    if (obj.contains("source_id")) row.source_id = json_string_field(obj, "source_id");
    return row;
}

EventRow row_from_tsv(const std::string& line, double seconds_per_unit) {
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
        const auto tab = line.find('\t', pos);
        fields.push_back(line.substr(pos, tab == std::string::npos ? tab : tab - pos));
        if (tab == std::string::npos) break;
        pos = tab + 1;
    }
    if (fields.size() < 3 || fields.size() > 4)
        throw ParseError("expected url<TAB>group<TAB>timestamp[<TAB>source_id]");
    EventRow row;
    row.url = trim(fields[0]);
    row.group = trim(fields[1]);
    row.abs_hours = timeutil::parse_iso8601(trim(fields[2])) / seconds_per_unit;
    if (fields.size() == 4) row.source_id = trim(fields[3]);
    return row;
}

} // namespace

std::vector<EventRow> read_event_rows(std::istream& in, const std::string& name,
                                      double seconds_per_unit) {
    std::vector<EventRow> rows;
    std::string line;
    std::size_t lineno = 0;
    int json_mode = -1;  // decided on the first non-empty line
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (json_mode < 0) json_mode = (t[0] == '{') ? 1 : 0;
        try {
            rows.push_back(json_mode ? row_from_json(t, seconds_per_unit)
                                     : row_from_tsv(line, seconds_per_unit));
        } catch (const ParseError& e) {
            throw ParseError(name + ":" + std::to_string(lineno) + ": " + e.what());
        } catch (const std::exception& e) {
            throw ParseError(name + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return rows;
}

namespace {

std::string dedup_key(const std::string& canonical, std::size_t group,
                      const std::string& source_id, double abs_hours) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &abs_hours, sizeof bits);
    std::string key = canonical;
    key += '\x1f';
    key += std::to_string(group);
    key += '\x1f';
    key += source_id;
    key += '\x1f';
    key += std::to_string(bits);
    return key;
}

struct PendingEvent {
    double abs_hours;
    std::size_t group;
    std::string source_id;
};

} // namespace

std::vector<EventSequence> build_sequences(const std::vector<EventRow>& rows,
                                           const GroupSet& groups,
                                           const RedirectMap& redirects,
                                           const DomainCategorizer& categorizer,
                                           const SequenceBuildOptions& options) {
    if (options.global_horizon && !(*options.global_horizon > 0.0))
        throw ConfigError("global horizon must be positive");
    if (!(options.horizon_padding >= 0.0))
        throw ConfigError("horizon padding must be non-negative");

    std::unordered_map<std::string, UrlRecord> canon_cache;
    std::map<std::string, std::vector<PendingEvent>> by_url;
    std::unordered_map<std::string, UrlCategory> category_of;
    std::unordered_set<std::string> seen_rows;
    std::unordered_map<std::string, double> last_time;
    std::size_t out_of_order = 0, duplicates = 0;

    for (const auto& row : rows) {
        auto cached = canon_cache.find(row.url);
        if (cached == canon_cache.end())
            cached = canon_cache
                         .emplace(row.url,
                                  canonicalize_url(row.url, redirects, categorizer))
                         .first;
        const UrlRecord& rec = cached->second;
        const std::size_t g = groups.require(row.group);

        if (!seen_rows.insert(dedup_key(rec.canonical, g, row.source_id, row.abs_hours))
                 .second) {
            ++duplicates;
            continue;
        }
        const auto last = last_time.find(rec.canonical);
        if (last != last_time.end() && row.abs_hours < last->second) ++out_of_order;
        last_time[rec.canonical] = row.abs_hours;

        by_url[rec.canonical].push_back({row.abs_hours, g, row.source_id});
        category_of.emplace(rec.canonical, rec.category);
    }
    if (duplicates > 0)
        logging::info("dropped " + std::to_string(duplicates) + " duplicate rows");
    if (out_of_order > 0)
        logging::warn("re-sorted " + std::to_string(out_of_order) +
                      " rows that arrived out of time order");

    std::vector<EventSequence> sequences;
    sequences.reserve(by_url.size());
    std::size_t clipped = 0;
    for (auto& [url, pending] : by_url) {
        std::sort(pending.begin(), pending.end(),
                  [](const PendingEvent& a, const PendingEvent& b) {
                      return std::tie(a.abs_hours, a.group, a.source_id) <
                             std::tie(b.abs_hours, b.group, b.source_id);
                  });
        EventSequence seq;
        seq.url = url;
        seq.category = category_of.at(url);
        const double t0 = pending.front().abs_hours;
        for (auto& p : pending) {
            const double t = p.abs_hours - t0;
            if (options.global_horizon && t > *options.global_horizon) {
                ++clipped;
                continue;
            }
            seq.events.push_back(Event{p.group, t, std::move(p.source_id)});
        }
        seq.window_T = options.global_horizon
                           ? *options.global_horizon
                           : seq.events.back().t + options.horizon_padding;
        if (seq.events.size() >= options.min_total_events)
            sequences.push_back(std::move(seq));
    }
    if (clipped > 0)
        logging::warn("dropped " + std::to_string(clipped) +
                      " events beyond the global horizon");
    return sequences;
}

std::size_t CountsSummary::category_row(UrlCategory c) {
    switch (c) {
        case UrlCategory::RussianState: return 0;
        case UrlCategory::OtherNews: return 1;
        case UrlCategory::Other: return 2;  // contributes to All only
    }
    return 2;
}

std::string_view CountsSummary::category_row_name(std::size_t row) {
    switch (row) {
        case 0: return "russian_state";
        case 1: return "other_news";
        default: return "all";
    }
}

CountsSummary counts_summary(const std::vector<EventSequence>& sequences,
                             const GroupSet& groups) {
    CountsSummary s;
    s.n_groups = groups.size();
    s.urls.assign(CountsSummary::kCategories, std::vector<std::size_t>(s.n_groups, 0));
    s.events.assign(CountsSummary::kCategories, std::vector<std::size_t>(s.n_groups, 0));
    s.mean_lambda0.assign(CountsSummary::kCategories,
                          std::vector<std::optional<double>>(s.n_groups));

    for (const auto& seq : sequences) {
        std::vector<std::size_t> per_group(s.n_groups, 0);
        for (const auto& e : seq.events) ++per_group.at(e.group);
        const std::size_t row = CountsSummary::category_row(seq.category);
        for (std::size_t k = 0; k < s.n_groups; ++k) {
            if (per_group[k] == 0) continue;
            if (row < 2) {
                s.urls[row][k] += 1;
                s.events[row][k] += per_group[k];
            }
            s.urls[2][k] += 1;
            s.events[2][k] += per_group[k];
        }
    }
    return s;
}

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace

void write_counts_summary(std::ostream& out, const CountsSummary& summary,
                          const GroupSet& groups) {
    out << "metric\tcategory";
    for (std::size_t k = 0; k < groups.size(); ++k) out << '\t' << groups.label(k);
    out << '\n';
    const char* metrics[] = {"urls", "events", "mean_lambda0"};
    for (std::size_t m = 0; m < 3; ++m) {
        for (std::size_t row = 0; row < CountsSummary::kCategories; ++row) {
            out << metrics[m] << '\t' << CountsSummary::category_row_name(row);
            for (std::size_t k = 0; k < summary.n_groups; ++k) {
                out << '\t';
                if (m == 0)
                    out << summary.urls[row][k];
                else if (m == 1)
                    out << summary.events[row][k];
                else if (summary.mean_lambda0[row][k])
                    out << format_double(*summary.mean_lambda0[row][k]);
            }
            out << '\n';
        }
    }
}

void write_bundle(std::ostream& out, const std::vector<EventSequence>& sequences,
                  const GroupSet& groups) {
    for (const auto& seq : sequences) {
        ordered_json obj;
        obj["url"] = seq.url;
        obj["category"] = std::string(category_name(seq.category));
        obj["window"] = seq.window_T;
        ordered_json events = ordered_json::array();
        for (const auto& e : seq.events) {
            ordered_json ev;
            ev["g"] = groups.label(e.group);
            ev["t"] = e.t;
            if (!e.source_id.empty()) ev["id"] = e.source_id;
            if (e.parent >= Event::kParentBackground) ev["p"] = e.parent;
            events.push_back(std::move(ev));
        }
        obj["events"] = std::move(events);
        out << obj.dump() << '\n';
    }
}

std::vector<EventSequence> read_bundle(std::istream& in, const GroupSet& groups,
                                       const std::string& name) {
    std::vector<EventSequence> sequences;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        try {
            const auto obj = ordered_json::parse(t);
            EventSequence seq;
            seq.url = obj.at("url").get<std::string>();
            seq.category = category_from_name(obj.at("category").get<std::string>());
            seq.window_T = obj.at("window").get<double>();
            if (!(seq.window_T > 0.0)) throw ParseError("window must be positive");
            double prev = 0.0;
            for (const auto& ev : obj.at("events")) {
                Event e;
                e.group = groups.require(ev.at("g").get<std::string>());
                e.t = ev.at("t").get<double>();
                if (!(e.t >= 0.0) || e.t > seq.window_T)
                    throw ParseError("event time outside [0, window]");
                if (e.t < prev) throw ParseError("events out of order");
                prev = e.t;
                if (ev.contains("id")) e.source_id = ev.at("id").get<std::string>();
                if (ev.contains("p")) {
                    e.parent = ev.at("p").get<int>();
                    if (e.parent < Event::kParentBackground)
                        throw ParseError("bad parent index");
                }
                seq.events.push_back(std::move(e));
            }
            if (seq.events.empty()) throw ParseError("sequence with no events");
            sequences.push_back(std::move(seq));
        } catch (const ParseError& e) {
            throw ParseError(name + ":" + std::to_string(lineno) + ": " + e.what());
        } catch (const std::exception& e) {
            throw ParseError(name + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return sequences;
}

} // namespace cascade
