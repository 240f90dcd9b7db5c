#include "cascade/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

#include "cascade/characterize.hpp"
#include "cascade/errors.hpp"
#include "cascade/events.hpp"
#include "cascade/influence.hpp"
#include "cascade/logging.hpp"
#include "cascade/stats.hpp"

namespace cascade::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::ifstream open_input(const std::string& path, const char* what) {
    if (path.empty())
        throw ConfigError(std::string("no ") + what + " path configured");
    std::ifstream in(path);
    if (!in) throw ConfigError(std::string(what) + " file not found: " + path);
    return in;
}

std::ofstream open_output(const fs::path& path) {
    if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

// One logical table written as both .tsv and .jsonl.
class TableWriter {
public:
    TableWriter(const fs::path& stem, std::vector<std::string> columns)
        : columns_(std::move(columns)),
          tsv_(open_output(fs::path(stem).concat(".tsv"))),
          jsonl_(open_output(fs::path(stem).concat(".jsonl"))) {
        for (std::size_t i = 0; i < columns_.size(); ++i)
            tsv_ << (i ? "\t" : "") << columns_[i];
        tsv_ << '\n';
    }

    struct Cell {
        enum class Kind { Text, Real, Integer, Boolean, Null } kind;
        std::string text;
        double real = 0.0;
        long long integer = 0;
        bool boolean = false;

        Cell(const char* s) : kind(Kind::Text), text(s) {}
        Cell(std::string s) : kind(Kind::Text), text(std::move(s)) {}
        Cell(std::string_view s) : kind(Kind::Text), text(s) {}
        Cell(double v) : kind(std::isfinite(v) ? Kind::Real : Kind::Null), real(v) {}
        Cell(long long v) : kind(Kind::Integer), integer(v) {}
        Cell(std::size_t v) : kind(Kind::Integer), integer(static_cast<long long>(v)) {}
        Cell(bool v) : kind(Kind::Boolean), boolean(v) {}
    };

    void row(const std::vector<Cell>& cells) {
        ordered_json obj;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const Cell& c = cells[i];
            if (i) tsv_ << '\t';
            switch (c.kind) {
                case Cell::Kind::Text:
                    tsv_ << c.text;
                    obj[columns_[i]] = c.text;
                    break;
                case Cell::Kind::Real:
                    tsv_ << fmt(c.real);
                    obj[columns_[i]] = c.real;
                    break;
                case Cell::Kind::Integer:
                    tsv_ << c.integer;
                    obj[columns_[i]] = c.integer;
                    break;
                case Cell::Kind::Boolean:
                    tsv_ << (c.boolean ? "true" : "false");
                    obj[columns_[i]] = c.boolean;
                    break;
                case Cell::Kind::Null:
                    obj[columns_[i]] = nullptr;
                    break;
            }
        }
        tsv_ << '\n';
        jsonl_ << obj.dump() << '\n';
    }

private:
    std::vector<std::string> columns_;
    std::ofstream tsv_;
    std::ofstream jsonl_;
};

double expect_positive(const ordered_json& v, const char* key) {
    const double x = v.get<double>();
    if (!(x > 0.0) || !std::isfinite(x))
        throw ConfigError(std::string("config key '") + key + "' must be positive");
    return x;
}

void reject_unknown_keys(const ordered_json& obj, const std::set<std::string>& known,
                         const std::string& where) {
    for (const auto& [key, value] : obj.items())
        if (!known.count(key))
            throw ConfigError("unknown config key '" + key + "' in " + where);
}

GammaPrior prior_from(const ordered_json& v, const char* key) {
    if (!v.is_array() || v.size() != 2)
        throw ConfigError(std::string("config key '") + key + "' must be [shape, rate]");
    GammaPrior p;
    p.shape = expect_positive(v[0], key);
    p.rate = expect_positive(v[1], key);
    return p;
}

} // namespace

std::string RunConfig::bundle_file() const {
    return bundle_path.empty() ? (fs::path(out_dir) / "sequences.jsonl").string()
                               : bundle_path;
}

std::string RunConfig::fits_file() const {
    return fits_path.empty() ? (fs::path(out_dir) / "fits.jsonl").string() : fits_path;
}

double RunConfig::seconds_per_unit() const {
    if (time_unit == "seconds") return 1.0;
    if (time_unit == "minutes") return 60.0;
    if (time_unit == "hours") return 3600.0;
    if (time_unit == "days") return 86400.0;
    throw ConfigError("unknown time_unit '" + time_unit +
                      "' (expected seconds|minutes|hours|days)");
}

void RunConfig::validate() const {
    GroupSet check(groups);  // enforces >= 2 unique labels
    (void)check;
    (void)seconds_per_unit();
    fit.validate();
    if (horizon && !(*horizon > 0.0)) throw ConfigError("horizon must be positive");
    if (!(horizon_padding >= 0.0)) throw ConfigError("horizon_padding must be >= 0");
    if (top_n == 0) throw ConfigError("top_n must be >= 1");
    if (sim_count == 0) throw ConfigError("simulate.count must be >= 1");
    if (!(sim_horizon > 0.0)) throw ConfigError("simulate.horizon must be positive");
    logging::level_from_string(log_level);
}

RunConfig load_config(const std::string& path) {
    std::ifstream in = open_input(path, "config");
    ordered_json obj;
    try {
        in >> obj;
    } catch (const std::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    if (!obj.is_object()) throw ConfigError(path + ": config must be a JSON object");

    static const std::set<std::string> known{
        "groups",       "events",         "redirects",       "state_domains",
        "news_domains", "params",         "archives",        "bundle",
        "fits",         "out",            "time_unit",       "horizon",
        "horizon_padding", "min_total_events", "fit",        "include_degenerate",
        "simulate",     "baseline_size",  "top_n",           "seed",
        "parallel",     "log_level"};
    reject_unknown_keys(obj, known, path);

    RunConfig c;
    try {
        if (!obj.contains("groups"))
            throw ConfigError("config requires a 'groups' list");
        c.groups = obj.at("groups").get<std::vector<std::string>>();
        if (obj.contains("events")) c.events_path = obj.at("events").get<std::string>();
        if (obj.contains("redirects"))
            c.redirects_path = obj.at("redirects").get<std::string>();
        if (obj.contains("state_domains"))
            c.state_domains_path = obj.at("state_domains").get<std::string>();
        if (obj.contains("news_domains"))
            c.news_domains_path = obj.at("news_domains").get<std::string>();
        if (obj.contains("params")) c.params_path = obj.at("params").get<std::string>();
        if (obj.contains("archives"))
            for (const auto& [name, p] : obj.at("archives").items())
                c.archives[name] = p.get<std::string>();
        if (obj.contains("bundle")) c.bundle_path = obj.at("bundle").get<std::string>();
        if (obj.contains("fits")) c.fits_path = obj.at("fits").get<std::string>();
        if (obj.contains("out")) c.out_dir = obj.at("out").get<std::string>();
        if (obj.contains("time_unit")) c.time_unit = obj.at("time_unit").get<std::string>();
        if (obj.contains("horizon")) c.horizon = expect_positive(obj.at("horizon"), "horizon");
        if (obj.contains("horizon_padding"))
            c.horizon_padding = obj.at("horizon_padding").get<double>();
        if (obj.contains("min_total_events"))
            c.min_total_events = obj.at("min_total_events").get<std::size_t>();
        if (obj.contains("include_degenerate"))
            c.include_degenerate = obj.at("include_degenerate").get<bool>();
        if (obj.contains("baseline_size"))
            c.baseline_size = obj.at("baseline_size").get<std::size_t>();
        if (obj.contains("top_n")) c.top_n = obj.at("top_n").get<std::size_t>();
        if (obj.contains("seed")) c.seed = obj.at("seed").get<std::uint64_t>();
        if (obj.contains("parallel")) c.parallel = obj.at("parallel").get<std::size_t>();
        if (obj.contains("log_level")) c.log_level = obj.at("log_level").get<std::string>();

        if (obj.contains("fit")) {
            const auto& f = obj.at("fit");
            reject_unknown_keys(f,
                                {"beta_grid", "max_iter", "tol", "mu_prior", "w_prior",
                                 "min_events_full_fit"},
                                "fit");
            if (f.contains("beta_grid"))
                c.fit.beta_grid = f.at("beta_grid").get<std::vector<double>>();
            if (f.contains("max_iter")) c.fit.max_iter = f.at("max_iter").get<std::size_t>();
            if (f.contains("tol")) c.fit.tol = expect_positive(f.at("tol"), "fit.tol");
            if (f.contains("mu_prior")) c.fit.mu_prior = prior_from(f.at("mu_prior"), "fit.mu_prior");
            if (f.contains("w_prior")) c.fit.w_prior = prior_from(f.at("w_prior"), "fit.w_prior");
            if (f.contains("min_events_full_fit"))
                c.fit.min_events_full_fit = f.at("min_events_full_fit").get<std::size_t>();
        }
        if (obj.contains("simulate")) {
            const auto& s = obj.at("simulate");
            reject_unknown_keys(
                s, {"horizon", "count", "allow_supercritical", "track_parents"},
                "simulate");
            if (s.contains("horizon"))
                c.sim_horizon = expect_positive(s.at("horizon"), "simulate.horizon");
            if (s.contains("count")) c.sim_count = s.at("count").get<std::size_t>();
            if (s.contains("allow_supercritical"))
                c.sim_allow_supercritical = s.at("allow_supercritical").get<bool>();
            if (s.contains("track_parents"))
                c.sim_track_parents = s.at("track_parents").get<bool>();
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    c.validate();
    return c;
}

namespace {

DomainCategorizer load_categorizer(const RunConfig& config) {
    std::unordered_set<std::string> state, news;
    if (!config.state_domains_path.empty()) {
        auto in = open_input(config.state_domains_path, "state domain list");
        state = DomainCategorizer::load_hosts(in, config.state_domains_path);
    }
    if (!config.news_domains_path.empty()) {
        auto in = open_input(config.news_domains_path, "news domain list");
        news = DomainCategorizer::load_hosts(in, config.news_domains_path);
    }
    return DomainCategorizer(std::move(state), std::move(news));
}

RedirectMap load_redirects(const RunConfig& config) {
    if (config.redirects_path.empty()) return RedirectMap{};
    auto in = open_input(config.redirects_path, "redirect map");
    return RedirectMap::load(in, config.redirects_path);
}

void write_counts(const RunConfig& config, const CountsSummary& counts,
                  const GroupSet& groups) {
    auto tsv = open_output(fs::path(config.out_dir) / "counts_summary.tsv");
    write_counts_summary(tsv, counts, groups);

    auto jsonl = open_output(fs::path(config.out_dir) / "counts_summary.jsonl");
    const char* metrics[] = {"urls", "events", "mean_lambda0"};
    for (std::size_t m = 0; m < 3; ++m) {
        for (std::size_t row = 0; row < CountsSummary::kCategories; ++row) {
            ordered_json obj;
            obj["metric"] = metrics[m];
            obj["category"] = std::string(CountsSummary::category_row_name(row));
            ordered_json vals = ordered_json::object();
            for (std::size_t k = 0; k < counts.n_groups; ++k) {
                if (m == 0)
                    vals[groups.label(k)] = counts.urls[row][k];
                else if (m == 1)
                    vals[groups.label(k)] = counts.events[row][k];
                else if (counts.mean_lambda0[row][k])
                    vals[groups.label(k)] = *counts.mean_lambda0[row][k];
                else
                    vals[groups.label(k)] = nullptr;
            }
            obj["values"] = std::move(vals);
            jsonl << obj.dump() << '\n';
        }
    }
}

HawkesParams params_from_json(const ordered_json& obj, std::size_t n_groups) {
    HawkesParams p;
    p.mu = obj.at("mu").get<std::vector<double>>();
    const auto rows = obj.at("W").get<std::vector<std::vector<double>>>();
    p.beta = obj.at("beta").get<double>();
    if (p.mu.size() != n_groups || rows.size() != n_groups)
        throw ParseError("parameter dimensions do not match the configured groups");
    p.W = Matrix(n_groups, n_groups);
    for (std::size_t s = 0; s < n_groups; ++s) {
        if (rows[s].size() != n_groups)
            throw ParseError("W must be a square matrix");
        for (std::size_t d = 0; d < n_groups; ++d) p.W(s, d) = rows[s][d];
    }
    p.validate();
    return p;
}

ordered_json params_to_json(const HawkesParams& p) {
    ordered_json obj;
    obj["mu"] = p.mu;
    ordered_json w = ordered_json::array();
    for (std::size_t s = 0; s < p.n_groups(); ++s) {
        ordered_json row = ordered_json::array();
        for (std::size_t d = 0; d < p.n_groups(); ++d) row.push_back(p.W(s, d));
        w.push_back(std::move(row));
    }
    obj["W"] = std::move(w);
    obj["beta"] = p.beta;
    return obj;
}

std::vector<FitResult> read_fits(const std::string& path, std::size_t n_groups) {
    auto in = open_input(path, "fits");
    std::vector<FitResult> fits;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto obj = ordered_json::parse(line);
            FitResult fr;
            fr.url = obj.at("url").get<std::string>();
            fr.category = category_from_name(obj.at("category").get<std::string>());
            fr.error = obj.value("error", std::string{});
            fr.degenerate = obj.value("degenerate", false);
            fr.converged = obj.value("converged", false);
            fr.iterations = obj.value("iterations", std::size_t{0});
            fr.loglik = obj.value("loglik", 0.0);
            fr.penalized = obj.value("penalized", 0.0);
            fr.n_events_per_group =
                obj.value("n_events", std::vector<std::size_t>(n_groups, 0));
            if (fr.ok()) {
                fr.params = params_from_json(obj, n_groups);
                fr.beta = fr.params.beta;
            }
            fits.push_back(std::move(fr));
        } catch (const std::exception& e) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return fits;
}

std::array<std::vector<std::size_t>, kAggCategories> category_event_counts(
    const CountsSummary& counts) {
    std::array<std::vector<std::size_t>, kAggCategories> n;
    for (std::size_t c = 0; c < kAggCategories; ++c) n[c] = counts.events[c];
    return n;
}

} // namespace

void run_ingest(const RunConfig& config) {
    const GroupSet groups(config.groups);
    auto in = open_input(config.events_path, "events");
    const auto rows = read_event_rows(in, config.events_path, config.seconds_per_unit());
    if (rows.empty()) logging::warn("no event rows in " + config.events_path);

    SequenceBuildOptions opts;
    opts.global_horizon = config.horizon;
    opts.horizon_padding = config.horizon_padding;
    opts.min_total_events = config.min_total_events;

    const auto redirects = load_redirects(config);
    const auto categorizer = load_categorizer(config);
    const auto sequences = build_sequences(rows, groups, redirects, categorizer, opts);

    auto bundle = open_output(config.bundle_file());
    write_bundle(bundle, sequences, groups);
    write_counts(config, counts_summary(sequences, groups), groups);
    logging::info("ingested " + std::to_string(rows.size()) + " rows into " +
                  std::to_string(sequences.size()) + " sequences");
}

void run_simulate(const RunConfig& config) {
    const GroupSet groups(config.groups);
    auto in = open_input(config.params_path, "parameters");
    std::string line;
    HawkesParams params;
    bool have = false;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            params = params_from_json(ordered_json::parse(line), groups.size());
        } catch (const std::exception& e) {
            throw ConfigError(config.params_path + ": " + e.what());
        }
        have = true;
        break;
    }
    if (!have) throw ConfigError(config.params_path + ": no parameter record found");

    std::vector<EventSequence> traces;
    traces.reserve(config.sim_count);
    for (std::size_t i = 0; i < config.sim_count; ++i) {
        SimulationSpec spec;
        spec.params = params;
        spec.horizon_T = config.sim_horizon;
        spec.seed = config.seed + i;
        spec.allow_supercritical = config.sim_allow_supercritical;
        spec.track_parents = config.sim_track_parents;
        EventSequence seq = simulate(spec);
        char name[32];
        std::snprintf(name, sizeof name, "sim-%06zu", i);
        seq.url = name;
        traces.push_back(std::move(seq));
    }

    auto out = open_output(fs::path(config.out_dir) / "simulated.jsonl");
    std::size_t total = 0;
    for (const auto& t : traces) total += t.events.size();
    write_bundle(out, traces, groups);
    logging::info("simulated " + std::to_string(traces.size()) + " sequences, " +
                  std::to_string(total) + " events");
}

void run_fit(const RunConfig& config) {
    const GroupSet groups(config.groups);
    auto in = open_input(config.bundle_file(), "sequence bundle");
    const auto sequences = read_bundle(in, groups, config.bundle_file());
    const auto fits = fit_corpus(sequences, groups.size(), config.fit, config.parallel);

    auto out = open_output(config.fits_file());
    for (const auto& fr : fits) {
        ordered_json obj;
        obj["url"] = fr.url;
        obj["category"] = std::string(category_name(fr.category));
        if (fr.ok()) {
            const ordered_json pj = params_to_json(fr.params);
            obj["mu"] = pj.at("mu");
            obj["W"] = pj.at("W");
            obj["beta"] = fr.beta;
            obj["loglik"] = fr.loglik;
            obj["penalized"] = fr.penalized;
            obj["iterations"] = fr.iterations;
            obj["converged"] = fr.converged;
            obj["degenerate"] = fr.degenerate;
        } else {
            obj["error"] = fr.error;
        }
        obj["n_events"] = fr.n_events_per_group;
        out << obj.dump() << '\n';
    }

    const auto agg = aggregate(fits, groups.size(), config.include_degenerate);
    auto agg_out = open_output(fs::path(config.out_dir) / "aggregate.jsonl");
    for (std::size_t c = 0; c < kAggCategories; ++c) {
        ordered_json obj;
        obj["category"] = std::string(agg_category_name(static_cast<AggCategory>(c)));
        obj["n_fits"] = agg.n_fits[c];
        if (agg.n_fits[c] > 0) {
            obj["mean_mu"] = agg.mean_mu[c];
            ordered_json w = ordered_json::array();
            for (std::size_t s = 0; s < groups.size(); ++s) {
                ordered_json row = ordered_json::array();
                for (std::size_t d = 0; d < groups.size(); ++d)
                    row.push_back(agg.mean_W[c](s, d));
                w.push_back(std::move(row));
            }
            obj["mean_W"] = std::move(w);
        } else {
            obj["mean_mu"] = nullptr;  // explicit empty marker
            obj["mean_W"] = nullptr;
        }
        agg_out << obj.dump() << '\n';
    }

    CountsSummary counts = counts_summary(sequences, groups);
    for (std::size_t c = 0; c < kAggCategories; ++c) {
        if (agg.n_fits[c] == 0) continue;
        for (std::size_t k = 0; k < groups.size(); ++k)
            counts.mean_lambda0[c][k] = agg.mean_mu[c][k];
    }
    write_counts(config, counts, groups);

    std::size_t failures = 0;
    for (const auto& fr : fits)
        if (!fr.ok()) ++failures;
    logging::info("fitted " + std::to_string(fits.size()) + " sequences (" +
                  std::to_string(failures) + " failures)");
}

void run_impact(const RunConfig& config) {
    const GroupSet groups(config.groups);
    auto bundle_in = open_input(config.bundle_file(), "sequence bundle");
    const auto sequences = read_bundle(bundle_in, groups, config.bundle_file());
    const auto counts = counts_summary(sequences, groups);
    const auto event_counts = category_event_counts(counts);
    const auto fits = read_fits(config.fits_file(), groups.size());
    const auto agg = aggregate(fits, groups.size(), config.include_degenerate);

    TableWriter table(fs::path(config.out_dir) / "impact",
                      {"category", "source", "dest", "direct_pct", "total_pct"});
    auto notes = open_output(fs::path(config.out_dir) / "impact_notes.jsonl");

    for (std::size_t c = 0; c < kAggCategories; ++c) {
        const auto cat = static_cast<AggCategory>(c);
        ordered_json note;
        note["category"] = std::string(agg_category_name(cat));
        note["n_fits"] = agg.n_fits[c];
        if (agg.n_fits[c] == 0) {
            note["status"] = "no retained fits";
            notes << note.dump() << '\n';
            continue;
        }
        const Matrix direct = direct_impact(agg.mean_W[c], event_counts[c]);
        Matrix total;
        const double radius = spectral_radius(agg.mean_W[c]);
        note["spectral_radius"] = radius;
        bool total_ok = radius < 1.0;
        if (total_ok) {
            total = total_impact(agg.mean_W[c], event_counts[c]);
            note["status"] = "ok";
        } else {
            note["status"] = "total impact refused: spectral radius " + fmt(radius) +
                             " >= 1 (supercritical mean weights)";
            logging::warn(note["status"].get<std::string>());
        }
        notes << note.dump() << '\n';

        const double nan = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t s = 0; s < groups.size(); ++s)
            for (std::size_t d = 0; d < groups.size(); ++d)
                table.row({std::string(agg_category_name(cat)), groups.label(s),
                           groups.label(d), direct(s, d),
                           total_ok ? total(s, d) : nan});
    }
}

void run_compare(const RunConfig& config) {
    const GroupSet groups(config.groups);
    const auto fits = read_fits(config.fits_file(), groups.size());
    const auto agg = aggregate(fits, groups.size(), config.include_degenerate);
    const auto cmp = compare_categories(agg);

    TableWriter table(fs::path(config.out_dir) / "category_comparison",
                      {"source", "dest", "mean_russian_state", "mean_other_news",
                       "percent_change", "ks_D", "ks_p", "significance", "status"});
    for (const auto& pair : cmp.pairs) {
        const char* stars = pair.stars == 2 ? "**" : (pair.stars == 1 ? "*" : "");
        table.row({groups.label(pair.source), groups.label(pair.dest),
                   pair.sufficient ? TableWriter::Cell(pair.mean_russian)
                                   : TableWriter::Cell(std::nan("")),
                   pair.sufficient ? TableWriter::Cell(pair.mean_other)
                                   : TableWriter::Cell(std::nan("")),
                   pair.percent_change, pair.ks.statistic, pair.ks.p_value,
                   std::string(stars),
                   std::string(pair.sufficient ? "ok" : "insufficient")});
    }
}

namespace {

void write_ecdf(const fs::path& stem, const std::vector<double>& samples) {
    if (samples.empty()) return;
    const Ecdf ecdf(samples);
    TableWriter table(stem, {"x", "F"});
    for (const auto& [x, f] : ecdf.step_points()) table.row({x, f});
}

void write_ranked(const fs::path& stem,
                  const std::vector<std::pair<std::string, double>>& ranked,
                  const char* item_col) {
    TableWriter table(stem, {item_col, "pct"});
    for (const auto& [item, pct] : ranked) table.row({item, pct});
}

struct Cohort {
    std::string name;
    std::vector<TweetRecord> tweets;
    std::vector<AccountRecord> accounts;
};

void characterize_cohort(const RunConfig& config, const Cohort& cohort) {
    const fs::path dir = fs::path(config.out_dir) / cohort.name;
    const auto& tweets = cohort.tweets;
    const auto& accounts = cohort.accounts;

    if (!tweets.empty()) {
        const auto hist = temporal_histograms(tweets);
        TableWriter day(dir / "hour_of_day", {"hour", "share"});
        for (std::size_t h = 0; h < hist.hour_of_day.size(); ++h)
            day.row({h, hist.hour_of_day[h]});
        TableWriter week(dir / "hour_of_week", {"hour", "share"});
        for (std::size_t h = 0; h < hist.hour_of_week.size(); ++h)
            week.row({h, hist.hour_of_week[h]});
    }

    {
        TableWriter table(dir / "creations", {"date", "accounts"});
        for (const auto& [date, count] : creation_timeline(accounts))
            table.row({date, count});
    }

    std::vector<std::string> names, descriptions;
    for (const auto& acc : accounts) {
        std::set<std::string> seen_desc;
        for (const auto& [name, t] : acc.screen_names) names.push_back(name);
        for (const std::size_t i : acc.tweet_idx) {
            const auto& d = tweets[i].description;
            if (!d.empty() && seen_desc.insert(d).second) descriptions.push_back(d);
        }
    }
    write_ranked(dir / "screen_name_char4",
                 top_ngrams(names, NgramMode::Char4, config.top_n), "ngram");
    write_ranked(dir / "screen_name_words",
                 top_ngrams(names, NgramMode::Word, config.top_n), "word");
    write_ranked(dir / "description_bigrams",
                 top_ngrams(descriptions, NgramMode::WordBigram, config.top_n), "bigram");

    const std::pair<TweetField, const char*> fields[] = {
        {TweetField::Hashtag, "hashtags"},   {TweetField::Mention, "mentions"},
        {TweetField::Domain, "domains"},     {TweetField::Client, "clients"},
        {TweetField::Language, "languages"}, {TweetField::Timezone, "timezones"}};
    for (const auto& [field, label] : fields)
        write_ranked(dir / (std::string("top_") + label),
                     top_items(tweets, field, config.top_n), "item");

    write_ecdf(dir / "diversity_languages_ecdf",
               per_user_diversity(tweets, TweetField::Language));
    write_ecdf(dir / "diversity_clients_ecdf",
               per_user_diversity(tweets, TweetField::Client));
    write_ecdf(dir / "diversity_domains_ecdf",
               per_user_diversity(tweets, TweetField::Domain));

    {
        TableWriter table(dir / "growth", {"user_id", "d_followers", "d_friends"});
        for (const auto& acc : accounts) {
            const Growth g = follower_growth(acc, tweets);
            table.row({acc.user_id, static_cast<long long>(g.d_followers),
                       static_cast<long long>(g.d_friends)});
        }
    }
    {
        TableWriter table(dir / "renames", {"user_id", "changes", "names"});
        for (const auto& acc : accounts) {
            const NameHistory h = screen_name_changes(acc);
            std::string joined;
            for (const auto& n : h.names) {
                if (!joined.empty()) joined += "|";
                joined += n;
            }
            table.row({acc.user_id, h.changes, joined});
        }
    }
    {
        TableWriter table(dir / "deletions",
                          {"user_id", "observations", "min_deleted", "deleted_fraction"});
        for (const auto& acc : accounts) {
            const AccountDeletions del = observed_deletions(acc, tweets);
            long long total = 0;
            for (const auto& obs : del.observations) total += obs.min_deleted;
            table.row({acc.user_id, del.observations.size(), total, del.fraction});
        }
    }
    {
        TableWriter table(dir / "deletions_monthly", {"month", "mean_deleted_pct"});
        for (const auto& [month, pct] : monthly_deletions(accounts, tweets))
            table.row({month, pct});
    }

    write_ecdf(dir / "sentiment_ecdf", collect_scores(tweets, ScoreField::Sentiment));
    write_ecdf(dir / "subjectivity_ecdf",
               collect_scores(tweets, ScoreField::Subjectivity));
}

} // namespace

void run_characterize(const RunConfig& config) {
    if (config.archives.empty())
        throw ConfigError("characterize requires at least one archive in 'archives'");

    std::vector<Cohort> cohorts;
    for (const auto& [name, path] : config.archives) {
        auto in = open_input(path, "tweet archive");
        Cohort cohort;
        cohort.name = name;
        cohort.tweets = read_tweets(in, path);
        cohort.accounts = build_accounts(cohort.tweets);
        logging::info("cohort '" + name + "': " + std::to_string(cohort.tweets.size()) +
                      " tweets, " + std::to_string(cohort.accounts.size()) + " accounts");
        cohorts.push_back(std::move(cohort));
    }

    for (const auto& cohort : cohorts) characterize_cohort(config, cohort);

    // cross-cohort distribution tests over every cohort pair
    if (cohorts.size() >= 2) {
        TableWriter table(fs::path(config.out_dir) / "cohort_ks",
                          {"cohort_a", "cohort_b", "metric", "ks_D", "ks_p",
                           "significance"});
        const auto metric = [](const Cohort& c,
                               const char* name) -> std::vector<double> {
            if (std::string_view(name) == "sentiment")
                return collect_scores(c.tweets, ScoreField::Sentiment);
            if (std::string_view(name) == "subjectivity")
                return collect_scores(c.tweets, ScoreField::Subjectivity);
            if (std::string_view(name) == "language_diversity")
                return per_user_diversity(c.tweets, TweetField::Language);
            return per_user_diversity(c.tweets, TweetField::Client);
        };
        for (std::size_t a = 0; a < cohorts.size(); ++a) {
            for (std::size_t b = a + 1; b < cohorts.size(); ++b) {
                for (const char* name : {"sentiment", "subjectivity",
                                         "language_diversity", "client_diversity"}) {
                    const auto sa = metric(cohorts[a], name);
                    const auto sb = metric(cohorts[b], name);
                    if (sa.empty() || sb.empty()) continue;
                    const KsResult ks = ks_two_sample(sa, sb);
                    const char* stars =
                        ks.p_value < 0.01 ? "**" : (ks.p_value < 0.05 ? "*" : "");
                    table.row({cohorts[a].name, cohorts[b].name, std::string(name),
                               ks.statistic, ks.p_value, std::string(stars)});
                }
            }
        }
    }

    // matched baseline cohort: reference rates from "trolls", picks from
    // "baseline"
    if (config.baseline_size > 0) {
        const Cohort* ref = nullptr;
        const Cohort* pool = nullptr;
        for (const auto& c : cohorts) {
            if (c.name == "trolls") ref = &c;
            if (c.name == "baseline") pool = &c;
        }
        if (!ref || !pool)
            throw ConfigError(
                "baseline matching needs archives named 'trolls' and 'baseline'");
        std::vector<double> ref_rates;
        for (const auto& acc : ref->accounts)
            if (const auto r = tweet_rate(acc, ref->tweets)) ref_rates.push_back(*r);
        if (ref_rates.empty())
            throw ConfigError("no reference accounts carry a creation date");
        const auto selected = baseline_match(pool->accounts, pool->tweets, ref_rates,
                                             config.baseline_size);
        TableWriter table(fs::path(config.out_dir) / "matched_baseline",
                          {"user_id", "tweets_per_day"});
        for (const std::size_t i : selected)
            table.row({pool->accounts[i].user_id,
                       *tweet_rate(pool->accounts[i], pool->tweets)});
    }
}

int run_command(const std::string& command, const RunConfig& config) {
    try {
        logging::set_level(logging::level_from_string(config.log_level));
        if (command == "ingest")
            run_ingest(config);
        else if (command == "simulate")
            run_simulate(config);
        else if (command == "fit")
            run_fit(config);
        else if (command == "impact")
            run_impact(config);
        else if (command == "compare")
            run_compare(config);
        else if (command == "characterize")
            run_characterize(config);
        else
            throw ConfigError("unknown command '" + command + "'");
        return 0;
    } catch (const ConfigError& e) {
        logging::error(e.what());
        return 2;
    } catch (const std::exception& e) {
        logging::error(e.what());
        return 1;
    }
}

} // namespace cascade::cli
