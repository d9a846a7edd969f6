#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "center.hpp"
#include "depth.hpp"
#include "error.hpp"
#include "io.hpp"
#include "log.hpp"
#include "parallel.hpp"
#include "process.hpp"
#include "rng.hpp"
#include "smoothfn.hpp"

namespace ppdepth {

/// A time window [start, end) smoothed with its own kernel constants.
struct Segment {
    double start = 0.0;
    double end = 1.0;
    double c1 = 1.0;
    double c2 = 10.0;

    double length() const { return end - start; }
    KernelSpec kernel() const { return {c1, c2, length()}; }
};

/// Parses "0:5:c2=100,5:10:c2=50[:c1=...]". Missing constants take the defaults.
inline std::vector<Segment> parse_segments(const std::string& text, double default_c1, double default_c2) {
    std::vector<Segment> out;
    std::stringstream all(text);
    std::string item;
    while (std::getline(all, item, ',')) {
        if (item.empty()) continue;
        std::stringstream parts(item);
        std::string tok;
        std::vector<std::string> fields;
        while (std::getline(parts, tok, ':')) fields.push_back(tok);
        if (fields.size() < 2) throw invalid_input("segment '" + item + "': expected start:end[:key=value...]");
        Segment s;
        s.c1 = default_c1;
        s.c2 = default_c2;
        try {
            s.start = std::stod(fields[0]);
            s.end = std::stod(fields[1]);
            for (std::size_t i = 2; i < fields.size(); ++i) {
                const auto eq = fields[i].find('=');
                if (eq == std::string::npos) throw invalid_input("segment '" + item + "': bad field " + fields[i]);
                const auto key = fields[i].substr(0, eq);
                const double v = std::stod(fields[i].substr(eq + 1));
                if (key == "c1") s.c1 = v;
                else if (key == "c2") s.c2 = v;
                else throw invalid_input("segment '" + item + "': unknown key " + key);
            }
        } catch (const std::logic_error& e) {
            if (dynamic_cast<const invalid_input*>(&e)) throw;
            throw invalid_input("segment '" + item + "': malformed number");
        }
        require(s.end > s.start, "segment '" + item + "': end must exceed start");
        out.push_back(s);
    }
    require(!out.empty(), "no segments given");
    return out;
}

/// Segments must tile [0, T] without gaps or overlap.
inline void validate_segments(const std::vector<Segment>& segs, double T) {
    require(!segs.empty(), "segments: empty list");
    const double tol = 1e-9 * T;
    require(std::abs(segs.front().start) <= tol, "segments must start at 0");
    for (std::size_t i = 1; i < segs.size(); ++i)
        require(std::abs(segs[i].start - segs[i - 1].end) <= tol, "segments must be contiguous");
    require(std::abs(segs.back().end - T) <= tol, "segments must end at T");
}

/// Events in [start, end) (the final window also keeps `end`), shifted to start at 0.
inline PointProcess restrict_to_window(const PointProcess& p, const Segment& seg, bool last) {
    PointProcess out;
    out.T = seg.length();
    out.id = p.id;
    out.label = p.label;
    for (double e : p.events) {
        if (e >= seg.start && (e < seg.end || (last && e <= seg.end)))
            out.events.push_back(std::clamp(e - seg.start, 0.0, out.T));
    }
    return out;
}

/// Center options whose temperature scale and move width are derived per group.
inline CenterOptions group_scaled_center_options() {
    CenterOptions o;
    o.schedule.c = 0.0;
    o.schedule.sigma_move = 0.0;
    return o;
}

struct ClassifierConfig {
    DepthMethod method = DepthMethod::modified_h_depth;
    DepthConfig depth;     // method field is overridden by `method`
    std::size_t folds = 4;
    std::uint64_t seed = 0;
    CenterOptions center = group_scaled_center_options(); // c, sigma <= 0: scale per group
    double anneal_budget_fraction = 0.25;
};

struct ClassifyResult {
    std::string label;
    std::map<std::string, double> log_depths;
    bool tie = false;
};

using Groups = std::map<std::string, std::vector<PointProcess>>;

/// Fits one center per group with the combined estimator.
inline std::map<std::string, PointProcess> fit_group_centers(const Groups& groups, const KernelSpec& spec,
                                                             const ClassifierConfig& cfg) {
    std::map<std::string, PointProcess> centers;
    std::uint64_t idx = 0;
    for (const auto& [label, members] : groups) {
        require(!members.empty(), "group '" + label + "' is empty");
        SsdObjective obj(members, spec);
        CenterOptions opts = cfg.center;
        const auto scaled = AnnealSchedule::defaults_for(obj);
        if (opts.schedule.c <= 0.0) opts.schedule.c = scaled.c;
        if (opts.schedule.sigma_move <= 0.0) opts.schedule.sigma_move = scaled.sigma_move;
        opts.schedule.n_max = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::llround(static_cast<double>(opts.schedule.n_max) *
                                                     cfg.anneal_budget_fraction)));
        centers.emplace(label, combined_center(obj, opts, derive_seed(cfg.seed, idx++)).events);
    }
    return centers;
}

/// Label whose group gives `test` the largest depth. Exact ties go to the
/// lexicographically smallest label.
inline ClassifyResult classify_by_depth(const PointProcess& test, const Groups& groups, const KernelSpec& spec,
                                        const ClassifierConfig& cfg,
                                        const std::map<std::string, PointProcess>* centers = nullptr) {
    require(!groups.empty(), "classify_by_depth: no groups");
    for (const auto& [label, members] : groups) require(!members.empty(), "group '" + label + "' is empty");
    DepthConfig dcfg = cfg.depth;
    dcfg.method = cfg.method;
    std::map<std::string, PointProcess> fitted;
    if (cfg.method == DepthMethod::modified_h_depth && !centers) {
        fitted = fit_group_centers(groups, spec, cfg);
        centers = &fitted;
    }
    ClassifyResult res;
    for (const auto& [label, members] : groups) {
        std::optional<PointProcess> center;
        if (cfg.method == DepthMethod::modified_h_depth) center = centers->at(label);
        const auto rep = depth_report({test}, members, dcfg, spec, center);
        res.log_depths[label] = rep.entries.front().log_depth;
    }
    double best = -std::numeric_limits<double>::infinity();
    std::size_t n_best = 0;
    for (const auto& [label, ld] : res.log_depths) {
        if (ld > best) {
            best = ld;
            res.label = label;
            n_best = 1;
        } else if (ld == best) {
            ++n_best;
        }
    }
    if (res.label.empty()) res.label = res.log_depths.begin()->first;
    res.tie = n_best > 1 || !std::isfinite(best);
    if (res.tie) log::warn("classify: depth tie for '" + test.id + "', choosing '" + res.label + "'");
    return res;
}

struct ClassMetrics {
    std::string label;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
};

struct FoldResult {
    std::size_t fold = 0;
    std::size_t n_test = 0;
    std::size_t n_correct = 0;
    double accuracy() const { return n_test ? static_cast<double>(n_correct) / static_cast<double>(n_test) : 0.0; }
};

struct EvalReport {
    std::vector<std::string> labels;
    std::vector<std::vector<std::size_t>> confusion; // [true][predicted]
    double accuracy = 0.0;
    std::vector<ClassMetrics> per_class;
    std::vector<FoldResult> folds;
    nlohmann::json config;
    std::uint64_t fold_seed = 0; // seed that produced the accepted split
};

/// Fills accuracy and per-class precision/recall/F1 from the confusion matrix.
inline void finalize_metrics(EvalReport& rep) {
    const std::size_t k = rep.labels.size();
    std::size_t total = 0, diag = 0;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            total += rep.confusion[i][j];
            if (i == j) diag += rep.confusion[i][j];
        }
    rep.accuracy = total ? static_cast<double>(diag) / static_cast<double>(total) : 0.0;
    rep.per_class.clear();
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t tp = rep.confusion[c][c], pred = 0, actual = 0;
        for (std::size_t i = 0; i < k; ++i) {
            pred += rep.confusion[i][c];
            actual += rep.confusion[c][i];
        }
        ClassMetrics m;
        m.label = rep.labels[c];
        m.support = actual;
        m.precision = pred ? static_cast<double>(tp) / static_cast<double>(pred) : 0.0;
        m.recall = actual ? static_cast<double>(tp) / static_cast<double>(actual) : 0.0;
        m.f1 = (m.precision + m.recall) > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
        rep.per_class.push_back(m);
    }
}

/// Records which ids each fold used for fitting and for testing.
struct CvAudit {
    std::vector<std::set<std::string>> fit_ids;
    std::vector<std::set<std::string>> test_ids;

    std::size_t leaks() const {
        std::size_t n = 0;
        for (std::size_t f = 0; f < fit_ids.size(); ++f)
            for (const auto& id : test_ids[f]) n += fit_ids[f].count(id);
        return n;
    }
};

/// Stratified fold assignment: each class is shuffled and dealt round-robin.
/// Returns the fold of every observation, or nullopt if some class is
/// missing from some fold.
inline std::optional<std::vector<std::size_t>> stratified_folds(const std::vector<PointProcess>& data,
                                                                std::size_t k, std::uint64_t seed) {
    std::map<std::string, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < data.size(); ++i) by_label[*data[i].label].push_back(i);
    std::vector<std::size_t> fold(data.size(), 0);
    Rng rng = make_stream(seed, 0);
    std::size_t offset = 0;
    for (auto& [label, idx] : by_label) {
        std::shuffle(idx.begin(), idx.end(), rng);
        std::vector<bool> seen(k, false);
        for (std::size_t j = 0; j < idx.size(); ++j) {
            const std::size_t f = (offset + j) % k;
            fold[idx[j]] = f;
            seen[f] = true;
        }
        offset = (offset + idx.size()) % k;
        if (std::find(seen.begin(), seen.end(), false) != seen.end()) return std::nullopt;
    }
    return fold;
}

/// Stratified k-fold cross-validation of the depth classifier on one
/// kernel/window. Centers and depth reference sets use training folds only.
inline EvalReport cross_validate(const std::vector<PointProcess>& data, const KernelSpec& spec,
                                 const ClassifierConfig& cfg, CvAudit* audit = nullptr) {
    require(cfg.folds >= 2, "cross_validate: need at least 2 folds");
    require(data.size() >= cfg.folds, "cross_validate: more folds than observations");
    std::set<std::string> labels, ids;
    for (const auto& p : data) {
        require(p.label.has_value(), "cross_validate: observation '" + p.id + "' has no label");
        require(p.T == spec.T(), "cross_validate: observation '" + p.id + "' has a different T");
        require(ids.insert(p.id).second, "cross_validate: duplicate id '" + p.id + "'");
        labels.insert(*p.label);
    }
    require(labels.size() >= 2, "cross_validate: need at least two classes");

    std::optional<std::vector<std::size_t>> fold;
    std::uint64_t fold_seed = cfg.seed;
    for (std::uint64_t attempt = 0; attempt < 10 && !fold; ++attempt) {
        fold_seed = cfg.seed + attempt;
        fold = stratified_folds(data, cfg.folds, fold_seed);
        if (!fold) log::warn("cross_validate: a class is missing from a fold; reshuffling");
    }
    if (!fold) throw invalid_input("cross_validate: cannot place every class in every fold after 10 attempts");

    EvalReport rep;
    rep.labels.assign(labels.begin(), labels.end());
    rep.fold_seed = fold_seed;
    std::map<std::string, std::size_t> label_index;
    for (std::size_t i = 0; i < rep.labels.size(); ++i) label_index[rep.labels[i]] = i;
    const std::size_t k = rep.labels.size();

    std::vector<std::vector<std::vector<std::size_t>>> fold_conf(
        cfg.folds, std::vector<std::vector<std::size_t>>(k, std::vector<std::size_t>(k, 0)));
    std::vector<FoldResult> fold_res(cfg.folds);
    if (audit) {
        audit->fit_ids.assign(cfg.folds, {});
        audit->test_ids.assign(cfg.folds, {});
    }

    parallel_for(cfg.folds, [&](std::size_t f) {
        Groups train;
        std::vector<const PointProcess*> test;
        for (std::size_t i = 0; i < data.size(); ++i) {
            if ((*fold)[i] == f) test.push_back(&data[i]);
            else train[*data[i].label].push_back(data[i]);
        }
        ClassifierConfig fcfg = cfg;
        fcfg.seed = derive_seed(cfg.seed, 1000 + f);
        std::map<std::string, PointProcess> centers;
        if (cfg.method == DepthMethod::modified_h_depth) centers = fit_group_centers(train, spec, fcfg);
        if (audit) {
            for (const auto& [label, members] : train)
                for (const auto& m : members) audit->fit_ids[f].insert(m.id);
            for (const auto* t : test) audit->test_ids[f].insert(t->id);
        }
        fold_res[f].fold = f;
        for (const auto* t : test) {
            const auto r = classify_by_depth(*t, train, spec, fcfg,
                                             cfg.method == DepthMethod::modified_h_depth ? &centers : nullptr);
            const auto ti = label_index.at(*t->label);
            const auto pi = label_index.at(r.label);
            ++fold_conf[f][ti][pi];
            ++fold_res[f].n_test;
            if (ti == pi) ++fold_res[f].n_correct;
        }
    });

    rep.confusion.assign(k, std::vector<std::size_t>(k, 0));
    for (std::size_t f = 0; f < cfg.folds; ++f)
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) rep.confusion[i][j] += fold_conf[f][i][j];
    rep.folds = std::move(fold_res);
    finalize_metrics(rep);
    rep.config = {{"method", to_string(cfg.method)},
                  {"folds", cfg.folds},
                  {"seed", cfg.seed},
                  {"fold_seed", fold_seed},
                  {"kernel", {{"c1", spec.c1()}, {"c2", spec.c2()}, {"T", spec.T()}}},
                  {"h", cfg.depth.bandwidth(spec.T())},
                  {"p", cfg.depth.p}};
    return rep;
}

struct SegmentReport {
    Segment segment;
    EvalReport report;
};

/// Runs cross_validate independently on each window; one label decision per window.
inline std::vector<SegmentReport> cross_validate_segments(const std::vector<PointProcess>& data,
                                                          const std::vector<Segment>& segments,
                                                          const ClassifierConfig& cfg) {
    require(!data.empty(), "cross_validate: empty dataset");
    validate_segments(segments, data.front().T);
    std::vector<SegmentReport> out;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        std::vector<PointProcess> windowed;
        windowed.reserve(data.size());
        for (const auto& p : data) windowed.push_back(restrict_to_window(p, segments[s], s + 1 == segments.size()));
        out.push_back({segments[s], cross_validate(windowed, segments[s].kernel(), cfg)});
    }
    return out;
}

inline nlohmann::json to_json(const EvalReport& r) {
    nlohmann::json j;
    j["labels"] = r.labels;
    j["confusion"] = r.confusion;
    j["accuracy"] = r.accuracy;
    for (const auto& m : r.per_class)
        j["per_class"].push_back(
            {{"label", m.label}, {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}});
    for (const auto& f : r.folds)
        j["folds"].push_back({{"fold", f.fold}, {"n_test", f.n_test}, {"accuracy", f.accuracy()}});
    j["config"] = r.config;
    return j;
}

/// Text table: one row per window with accuracy and per-class F1.
inline std::string format_table(const std::vector<SegmentReport>& reps) {
    std::ostringstream os;
    char buf[64];
    os << "window        accuracy";
    if (!reps.empty())
        for (const auto& l : reps.front().report.labels) os << "  F1(" << l << ")";
    os << '\n';
    for (const auto& sr : reps) {
        std::snprintf(buf, sizeof buf, "[%g,%g)", sr.segment.start, sr.segment.end);
        os << buf;
        for (std::size_t pad = std::string(buf).size(); pad < 14; ++pad) os << ' ';
        std::snprintf(buf, sizeof buf, "%7.2f%%", 100.0 * sr.report.accuracy);
        os << buf;
        for (const auto& m : sr.report.per_class) {
            std::snprintf(buf, sizeof buf, "  %7.2f%%", 100.0 * m.f1);
            os << buf;
        }
        os << '\n';
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Ranking experiments

struct ExperimentModel {
    std::string name;
    IntensitySpec intensity;
    KernelSpec kernel;
    std::optional<std::vector<double>> intuitive_center;
};

/// HPP(0.045) on [0, 100], c1 = 1, c2 = 10, intuitive center (20, 40, 60, 80).
inline ExperimentModel hpp_model(double lambda = 0.045, double T = 100.0, double c2 = 10.0) {
    std::optional<std::vector<double>> intuitive;
    if (T == 100.0) intuitive = std::vector<double>{20.0, 40.0, 60.0, 80.0};
    return {"hpp", IntensitySpec::constant(lambda, T), KernelSpec(1.0, c2, T), intuitive};
}

/// IPP with lambda(t) = 3 phi(t; 25, 10) + 2 phi(t; 75, 10) on [0, 100], c2 = 25.
inline ExperimentModel ipp_model(double c2 = 25.0) {
    return {"ipp", IntensitySpec::mixture({{3.0, 25.0, 10.0}, {2.0, 75.0, 10.0}}, 100.0), KernelSpec(1.0, c2, 100.0),
            std::nullopt};
}

struct CenterRow {
    std::string method;
    std::vector<double> events;
    double ssd = 0.0;
    double wall_seconds = 0.0; // not deterministic; kept out of data files
};

struct ExperimentResult {
    std::vector<PointProcess> sample;
    CenterEstimate center; // combined estimate used by the modified depth
    std::vector<CenterRow> center_table;
    std::vector<std::pair<std::string, DepthReport>> rankings; // (name, report)
    std::size_t top_k = 5;
    std::size_t curve_grid = 201;
    KernelSpec kernel{1.0, 10.0, 100.0};
};

inline std::vector<PointProcess> simulate(const IntensitySpec& model, std::size_t n, std::uint64_t seed) {
    if (model.kind() == IntensitySpec::Kind::constant) return simulate_hpp(model(0.0), model.T(), n, seed);
    return simulate_ipp(model, n, seed);
}

/// Simulates, estimates centers, and ranks by h-depth and modified h-depth
/// (plus the intuitive center when the model has one).
inline ExperimentResult run_ranking_experiment(const ExperimentModel& model, std::size_t n, DepthConfig cfg,
                                               std::uint64_t seed, std::optional<CenterOptions> opts = std::nullopt,
                                               bool all_center_methods = true, std::size_t top_k = 5) {
    require(n >= 10, "experiment: n must be >= 10");
    ExperimentResult res;
    res.kernel = model.kernel;
    res.top_k = top_k;
    res.sample = simulate(model.intensity, n, derive_seed(seed, 0));
    SsdObjective obj(res.sample, model.kernel);
    CenterOptions co = opts ? *opts : default_center_options(obj);

    if (model.intuitive_center)
        res.center_table.push_back({"intuitive", *model.intuitive_center, obj(*model.intuitive_center), 0.0});
    const std::uint64_t center_seed = derive_seed(seed, 1);
    if (all_center_methods) {
        for (auto m : {CenterMethod::rjmcmc, CenterMethod::line_search}) {
            const auto est = estimate_center(obj, m, co, center_seed);
            res.center_table.push_back({to_string(m), est.events.events, est.ssd, est.wall_seconds});
        }
    }
    res.center = combined_center(obj, co, center_seed);
    res.center_table.push_back({"combined", res.center.events.events, res.center.ssd, res.center.wall_seconds});

    DepthConfig hcfg = cfg;
    hcfg.method = DepthMethod::h_depth;
    res.rankings.emplace_back("h_depth", rank(res.sample, hcfg, model.kernel));
    DepthConfig mcfg = cfg;
    mcfg.method = DepthMethod::modified_h_depth;
    res.rankings.emplace_back("modified_h_depth", rank(res.sample, mcfg, model.kernel, res.center.events));
    if (model.intuitive_center) {
        PointProcess ic{*model.intuitive_center, model.kernel.T(), "intuitive", std::nullopt};
        res.rankings.emplace_back("modified_h_depth_intuitive", rank(res.sample, mcfg, model.kernel, ic));
    }
    return res;
}

inline std::string events_field(const std::vector<double>& ev) {
    std::string s;
    for (std::size_t i = 0; i < ev.size(); ++i) {
        if (i) s += ' ';
        s += format_double(ev[i]);
    }
    return s;
}

/// CSV: id,count,depth,log_depth,rank in input order.
inline std::string ranking_csv(const DepthReport& rep, const std::vector<PointProcess>& sample) {
    std::ostringstream os;
    os << "id,count,depth,log_depth,rank\n";
    for (std::size_t i = 0; i < rep.entries.size(); ++i) {
        const auto& e = rep.entries[i];
        os << e.id << ',' << sample[i].size() << ',' << format_double(e.depth) << ',' << format_double(e.log_depth)
           << ',' << e.rank << '\n';
    }
    return os.str();
}

/// CSV listing the top-k and bottom-k members of every ranking.
inline std::string top_bottom_csv(const ExperimentResult& res) {
    std::ostringstream os;
    os << "method,group,rank,id,count,events\n";
    for (const auto& [name, rep] : res.rankings) {
        const auto order = rep.order();
        const std::size_t k = std::min(res.top_k, order.size());
        for (std::size_t r = 0; r < k; ++r) {
            const auto i = order[r];
            os << name << ",top," << r + 1 << ',' << rep.entries[i].id << ',' << res.sample[i].size() << ','
               << events_field(res.sample[i].events) << '\n';
        }
        for (std::size_t r = order.size() - k; r < order.size(); ++r) {
            const auto i = order[r];
            os << name << ",bottom," << r + 1 << ',' << rep.entries[i].id << ',' << res.sample[i].size() << ','
               << events_field(res.sample[i].events) << '\n';
        }
    }
    return os.str();
}

/// Long-format smoothed curves with every ranking's depth as a colour value.
inline std::string curves_csv(const ExperimentResult& res) {
    std::ostringstream os;
    os << "id,t,f";
    for (const auto& [name, rep] : res.rankings) os << ",depth_" << name;
    os << '\n';
    const double T = res.kernel.T();
    const auto g = res.curve_grid;
    for (std::size_t i = 0; i < res.sample.size(); ++i) {
        const auto curve = smooth(res.sample[i], res.kernel);
        for (std::size_t j = 0; j < g; ++j) {
            const double t = T * static_cast<double>(j) / static_cast<double>(g - 1);
            os << res.sample[i].id << ',' << format_double(t) << ',' << format_double(curve(t));
            for (const auto& [name, rep] : res.rankings) os << ',' << format_double(rep.entries[i].depth);
            os << '\n';
        }
    }
    return os.str();
}

/// CSV: method,dimension,ssd,events (no timings).
inline std::string center_table_csv(const ExperimentResult& res) {
    std::ostringstream os;
    os << "method,dimension,ssd,events\n";
    for (const auto& row : res.center_table)
        os << row.method << ',' << row.events.size() << ',' << format_double(row.ssd) << ','
           << events_field(row.events) << '\n';
    return os.str();
}

inline nlohmann::json to_json(const CenterEstimate& est, bool include_timing = false) {
    nlohmann::json j;
    j["method"] = to_string(est.method);
    j["events"] = est.events.events;
    j["dimension"] = est.events.size();
    j["ssd"] = est.ssd;
    j["dimension_bound"] = est.dimension_bound;
    j["seed"] = est.seed;
    j["converged"] = est.converged;
    j["trace"] = est.trace;
    j["visited_dimensions"] = est.visited_dimensions;
    nlohmann::json cands = nlohmann::json::array();
    for (const auto& c : est.candidates) cands.push_back({{"dimension", c.dim}, {"ssd", c.ssd}, {"events", c.events}});
    j["candidates"] = cands;
    nlohmann::json ties = nlohmann::json::array();
    for (const auto& t : est.near_ties) ties.push_back({{"dimension", t.dim}, {"ssd", t.ssd}});
    j["near_ties"] = ties;
    if (include_timing) j["wall_seconds"] = est.wall_seconds;
    return j;
}

/// Table-style summary of the center estimators: method, center, SSD, time.
inline std::string center_summary(const std::vector<CenterRow>& rows) {
    std::ostringstream os;
    char buf[96];
    os << "method        SSD            time(s)  center\n";
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%-12s  %-13.3f  %7.2f  [", r.method.c_str(), r.ssd, r.wall_seconds);
        os << buf;
        for (std::size_t i = 0; i < r.events.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%s%.2f", i ? "," : "", r.events[i]);
            os << buf;
        }
        os << "]\n";
    }
    return os.str();
}

} // namespace ppdepth
