#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <ppdepth/ppdepth.hpp>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ppdepth;

namespace {

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw invalid_input("cannot read '" + path.string() + "' for hashing");
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256 init failed");
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return os.str();
}

template <class T>
std::string to_config_string(const T& v) {
    if constexpr (std::is_same_v<T, std::string>) return v;
    else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
    else if constexpr (std::is_floating_point_v<T>) return format_double(v);
    else return std::to_string(v);
}

/// Flags that mirror config keys. Values given on the command line are
/// copied into the RunConfig after the config file is loaded, so they win.
class Overrides {
public:
    template <class T>
    CLI::Option* add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& desc) {
        auto holder = std::make_shared<std::optional<T>>();
        auto* opt = app->add_option(flag, *holder, desc);
        apply_.push_back([holder, key](RunConfig& cfg) {
            if (*holder) cfg.set(key, to_config_string(**holder));
        });
        return opt;
    }

    CLI::Option* add_flag(CLI::App* app, const std::string& flag, const std::string& key, const std::string& desc) {
        auto holder = std::make_shared<bool>(false);
        auto* opt = app->add_flag(flag, *holder, desc);
        apply_.push_back([holder, key](RunConfig& cfg) {
            if (*holder) cfg.set(key, "true");
        });
        return opt;
    }

    void apply(RunConfig& cfg) const {
        for (const auto& f : apply_) f(cfg);
    }

private:
    std::vector<std::function<void(RunConfig&)>> apply_;
};

struct Run {
    RunConfig cfg;
    std::string command;
    std::vector<fs::path> inputs;
    std::vector<fs::path> outputs;

    std::uint64_t seed() const { return cfg.get_uint("seed", 0); }

    std::vector<PointProcess> load(const std::string& path, const std::optional<std::string>& format,
                                   std::optional<double> T) {
        inputs.emplace_back(path);
        return load_processes(path, format ? parse_file_format(*format) : format_from_path(path), T);
    }

    /// Writes `content` to `path`, or to stdout when path is empty or "-".
    void emit(const std::string& path, const std::string& content) {
        if (path.empty() || path == "-") {
            std::cout << content;
            std::cout.flush();
            return;
        }
        write_file(path, content);
        outputs.emplace_back(path);
    }

    static void write_file(const fs::path& path, const std::string& content) {
        if (path.has_parent_path()) fs::create_directories(path.parent_path());
        std::ofstream os(path, std::ios::binary);
        if (!os) throw invalid_input("cannot write '" + path.string() + "'");
        os << content;
        if (!os) throw invalid_input("write failed for '" + path.string() + "'");
    }

    json manifest_body(const fs::path& base) const {
        json j;
        j["tool"] = "ppdepth";
        j["version"] = ppdepth::version;
        j["compiler"] = __VERSION__;
        j["rng"] = rng_name;
        j["command"] = command;
        j["seed"] = seed();
        j["config"] = cfg.values();
        j["inputs"] = json::array();
        for (const auto& p : inputs) j["inputs"].push_back({{"path", p.string()}, {"sha256", sha256_file(p)}});
        j["outputs"] = json::array();
        for (const auto& p : outputs) {
            const auto rel = base.empty() ? p : fs::relative(p, base);
            j["outputs"].push_back(
                {{"path", rel.string()}, {"bytes", fs::file_size(p)}, {"sha256", sha256_file(p)}});
        }
        return j;
    }

    /// Single-file commands put the manifest next to the output as <out>.manifest.json.
    void write_sidecar_manifest() const {
        if (outputs.empty()) {
            log::info("no output files; manifest skipped");
            return;
        }
        const fs::path first = outputs.front();
        write_file(first.string() + ".manifest.json", manifest_body({}).dump(2) + "\n");
    }
};

KernelSpec kernel_for(const RunConfig& cfg, double T) {
    return {cfg.get_double("kernel.c1", 1.0), cfg.get_double("kernel.c2", 10.0), T,
            parse_kernel_family(cfg.get("kernel.family", "gaussian"))};
}

DepthConfig depth_config(const RunConfig& cfg) {
    DepthConfig d;
    d.method = parse_depth_method(cfg.get("depth.method", "h_depth"));
    d.h_rule = parse_h_rule(cfg.get("depth.h_rule", cfg.has("depth.h") ? "fixed" : "proportional_to_T"));
    d.h = cfg.get_double("depth.h", 100.0);
    d.h_constant = cfg.get_double("depth.C", 1.0);
    d.p = cfg.get_double("depth.p", 2.0);
    d.leave_one_out = cfg.get_bool("depth.leave_one_out", false);
    d.band_grid_size = cfg.get_uint("depth.band_grid", 1024);
    d.validate();
    return d;
}

CenterOptions center_options(const RunConfig& cfg, const SsdObjective& obj) {
    CenterOptions o = default_center_options(obj);
    o.schedule.n_max = cfg.get_uint("center.n_max", o.schedule.n_max);
    o.schedule.c = cfg.get_double("center.anneal_c", o.schedule.c);
    o.schedule.sigma_move = cfg.get_double("center.sigma_move", o.schedule.sigma_move);
    const auto cooling = cfg.get("center.cooling", "log");
    if (cooling == "log" || cooling == "logarithmic") o.schedule.rule = CoolingRule::logarithmic;
    else if (cooling == "constant") o.schedule.rule = CoolingRule::constant;
    else throw invalid_input("unknown cooling rule '" + cooling + "'");
    o.d_r = cfg.get_uint("center.dr", o.d_r);
    o.sgd.batch = cfg.get_uint("sgd.batch", o.sgd.batch);
    o.sgd.rate = cfg.get_double("sgd.rate", o.sgd.rate);
    o.sgd.epochs = cfg.get_uint("sgd.epochs", o.sgd.epochs);
    o.sgd.eps = cfg.get_double("sgd.eps", o.sgd.eps);
    o.schedule.validate();
    require(o.d_r >= 1, "center: dr must be >= 1");
    require(o.sgd.batch >= 1, "center: batch must be >= 1");
    require(o.sgd.epochs >= 1, "center: epochs must be >= 1");
    return o;
}

double common_T(const std::vector<PointProcess>& ps, const std::string& what) {
    require(!ps.empty(), what + ": no processes");
    for (const auto& p : ps) require(p.T == ps.front().T, what + ": processes have different T");
    return ps.front().T;
}

std::vector<double> parse_event_list(const std::string& s) {
    std::vector<double> out;
    std::string norm = s;
    std::replace(norm.begin(), norm.end(), ',', ' ');
    std::istringstream in(norm);
    std::string tok;
    while (in >> tok) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(tok, &pos));
            if (pos != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw invalid_input("malformed event time '" + tok + "'");
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string matrix_csv(const Matrix& m, const std::vector<PointProcess>& rows, const std::vector<PointProcess>& cols) {
    std::ostringstream os;
    os << "id";
    for (const auto& c : cols) os << ',' << c.id;
    os << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) {
        os << rows[i].id;
        for (double v : m[i]) os << ',' << format_double(v);
        os << '\n';
    }
    return os.str();
}

PointProcess load_center(Run& run, const std::string& path, double T) {
    const auto cs = run.load(path, std::nullopt, T);
    require(cs.size() == 1, "center file must hold exactly one process");
    return cs.front();
}

// Subcommand bodies --------------------------------------------------------

struct DataArgs {
    std::string data;
    std::optional<std::string> format;
    std::optional<double> T;

    void add(CLI::App* app, bool required = true) {
        auto* o = app->add_option("--data", data, "Input processes (.jsonl or .txt)");
        if (required) o->required();
        app->add_option("--format", format, "Input format: jsonl|text (default: from extension)");
        app->add_option("--T", T, "Override the interval length T");
    }
};

int cmd_simulate(Run& run, const std::string& model, const std::string& mixture, const std::string& out,
                 const std::string& format) {
    const double T = run.cfg.get_double("simulate.T", 100.0);
    const auto n = run.cfg.get_uint("experiment.n", 100);
    require(n >= 1, "simulate: n must be >= 1");
    std::vector<PointProcess> ps;
    if (model == "hpp") {
        ps = simulate_hpp(run.cfg.get_double("simulate.lambda", 0.045), T, n, run.seed());
    } else {
        ps = simulate_ipp(IntensitySpec::mixture(parse_mixture(mixture), T), n, run.seed());
    }
    std::ostringstream os;
    const auto fmt = !format.empty() ? parse_file_format(format) : (out.empty() ? FileFormat::jsonl : format_from_path(out));
    if (fmt == FileFormat::jsonl) save_jsonl(os, ps, T);
    else save_text(os, ps, T);
    run.emit(out, os.str());
    return 0;
}

int cmd_smooth(Run& run, const DataArgs& in, std::size_t grid, const std::string& out) {
    const auto ps = run.load(in.data, in.format, in.T);
    const auto spec = kernel_for(run.cfg, common_T(ps, "smooth"));
    require(grid >= 2, "smooth: grid must be >= 2");
    std::ostringstream os;
    os << "t,f,id\n";
    for (const auto& p : ps) {
        const auto vals = smooth(p, spec).evaluate_grid(grid);
        for (std::size_t i = 0; i < grid; ++i) {
            const double t = spec.T() * static_cast<double>(i) / static_cast<double>(grid - 1);
            os << format_double(t) << ',' << format_double(vals[i]) << ',' << p.id << '\n';
        }
    }
    run.emit(out, os.str());
    return 0;
}

int cmd_distance(Run& run, const std::string& a, const std::string& b, const std::optional<std::string>& format,
                 std::optional<double> T, const std::string& out) {
    const auto pa = run.load(a, format, T);
    const double Ta = common_T(pa, "distance");
    const auto spec = kernel_for(run.cfg, Ta);
    const double p = run.cfg.get_double("depth.p", 2.0);
    Matrix m;
    std::string csv;
    if (b.empty()) {
        m = distance_matrix(pa, spec, p);
        csv = matrix_csv(m, pa, pa);
    } else {
        const auto pb = run.load(b, format, T);
        require(common_T(pb, "distance") == Ta, "distance: --a and --b have different T");
        m = distance_matrix(pa, pb, spec, p);
        csv = matrix_csv(m, pa, pb);
    }
    run.emit(out, csv);
    return 0;
}

std::optional<PointProcess> center_for(Run& run, const DepthConfig& dcfg, const std::vector<PointProcess>& sample,
                                       const KernelSpec& spec, const std::string& center_file) {
    if (dcfg.method != DepthMethod::modified_h_depth) return std::nullopt;
    if (!center_file.empty()) return load_center(run, center_file, spec.T());
    log::info("no --center-file; estimating the center with the combined method");
    SsdObjective obj(sample, spec);
    return combined_center(obj, center_options(run.cfg, obj), run.seed()).events;
}

int cmd_depth(Run& run, const DataArgs& in, const std::string& sample_path, const std::string& center_file,
              const std::string& out) {
    const auto obs = run.load(in.data, in.format, in.T);
    const double T = common_T(obs, "depth");
    const bool self = sample_path.empty();
    const auto sample = self ? obs : run.load(sample_path, in.format, in.T);
    require(common_T(sample, "depth") == T, "depth: --data and --sample have different T");
    const auto spec = kernel_for(run.cfg, T);
    const auto dcfg = depth_config(run.cfg);
    const auto center = center_for(run, dcfg, sample, spec, center_file);
    const auto rep = depth_report(obs, sample, dcfg, spec, center, self);
    std::ostringstream os;
    os << "id,depth,log_depth,rank\n";
    for (const auto& e : rep.entries)
        os << e.id << ',' << format_double(e.depth) << ',' << format_double(e.log_depth) << ',' << e.rank << '\n';
    run.emit(out, os.str());
    return 0;
}

int cmd_rank(Run& run, const DataArgs& in, const std::string& center_file, std::size_t top_k, std::size_t bottom_k,
             const std::string& out) {
    const auto sample = run.load(in.data, in.format, in.T);
    const auto spec = kernel_for(run.cfg, common_T(sample, "rank"));
    const auto dcfg = depth_config(run.cfg);
    const auto center = center_for(run, dcfg, sample, spec, center_file);
    const auto rep = rank(sample, dcfg, spec, center);
    const auto order = rep.order();
    const bool select = top_k > 0 || bottom_k > 0;
    std::ostringstream os;
    os << "rank,id,count,depth,log_depth\n";
    for (std::size_t r = 0; r < order.size(); ++r) {
        if (select && !(r < top_k || r + bottom_k >= order.size())) continue;
        const auto i = order[r];
        const auto& e = rep.entries[i];
        os << e.rank << ',' << e.id << ',' << sample[i].size() << ',' << format_double(e.depth) << ','
           << format_double(e.log_depth) << '\n';
    }
    run.emit(out, os.str());
    return 0;
}

int cmd_center(Run& run, const DataArgs& in, bool report, const std::string& intuitive, const std::string& out) {
    const auto sample = run.load(in.data, in.format, in.T);
    const auto spec = kernel_for(run.cfg, common_T(sample, "center"));
    SsdObjective obj(sample, spec);
    const auto opts = center_options(run.cfg, obj);
    const auto method = parse_center_method(run.cfg.get("center.method", "combined"));
    const auto est = estimate_center(obj, method, opts, run.seed());
    run.emit(out, to_json(est).dump(2) + "\n");
    if (report) {
        std::vector<CenterRow> rows;
        if (!intuitive.empty()) {
            const auto ev = parse_event_list(intuitive);
            rows.push_back({"intuitive", ev, obj(ev), 0.0});
        }
        for (auto m : {CenterMethod::rjmcmc, CenterMethod::line_search, CenterMethod::combined}) {
            if (m == method) {
                rows.push_back({to_string(m), est.events.events, est.ssd, est.wall_seconds});
                continue;
            }
            const auto e = estimate_center(obj, m, opts, run.seed());
            rows.push_back({to_string(m), e.events.events, e.ssd, e.wall_seconds});
        }
        std::cerr << center_summary(rows);
    }
    if (!est.converged) {
        log::warn("center: line search hit the epoch limit before converging");
        return 3;
    }
    return 0;
}

int cmd_classify(Run& run, const DataArgs& in, const std::string& out) {
    const auto data = run.load(in.data, in.format, in.T);
    const double T = common_T(data, "classify");
    ClassifierConfig cc;
    cc.method = parse_depth_method(run.cfg.get("classify.method", "modified_h_depth"));
    cc.depth = depth_config(run.cfg);
    cc.folds = run.cfg.get_uint("classify.folds", 4);
    cc.seed = run.seed();
    const double c1 = run.cfg.get_double("kernel.c1", 1.0);
    const double c2 = run.cfg.get_double("kernel.c2", 10.0);
    std::vector<Segment> segs = run.cfg.has("classify.segments")
                                    ? parse_segments(run.cfg.get("classify.segments", ""), c1, c2)
                                    : std::vector<Segment>{{0.0, T, c1, c2}};
    if (cc.method == DepthMethod::modified_h_depth) {
        SsdObjective any(data, segs.front().kernel().with_T(T));
        const auto opts = center_options(run.cfg, any);
        cc.center.schedule = opts.schedule;
        cc.center.sgd = opts.sgd;
        cc.center.d_r = opts.d_r;
        // Temperature scale and move width are re-derived per group unless set.
        if (!run.cfg.has("center.anneal_c")) cc.center.schedule.c = 0.0;
        if (!run.cfg.has("center.sigma_move")) cc.center.schedule.sigma_move = 0.0;
    }
    const auto reps = cross_validate_segments(data, segs, cc);
    json j = json::array();
    for (const auto& r : reps) {
        auto e = to_json(r.report);
        e["window"] = {r.segment.start, r.segment.end};
        j.push_back(e);
    }
    run.emit(out, j.dump(2) + "\n");
    (out.empty() || out == "-" ? std::cerr : std::cout) << format_table(reps);
    return 0;
}

int cmd_experiment(Run& run, const std::string& model_name, const std::string& out_dir) {
    ExperimentModel model = model_name == "hpp"
                                ? hpp_model(run.cfg.get_double("simulate.lambda", 0.045), 100.0,
                                            run.cfg.get_double("kernel.c2", 10.0))
                                : ipp_model(run.cfg.get_double("kernel.c2", 25.0));
    model.kernel = KernelSpec(run.cfg.get_double("kernel.c1", 1.0), model.kernel.c2(), model.kernel.T());
    const auto n = run.cfg.get_uint("experiment.n", 100);
    const auto top_k = run.cfg.get_uint("experiment.top_k", 5);
    auto dcfg = depth_config(run.cfg);

    // Center options need the sample; run_ranking_experiment draws it from the seed.
    const auto sample = simulate(model.intensity, n, derive_seed(run.seed(), 0));
    SsdObjective obj(sample, model.kernel);
    const auto opts = center_options(run.cfg, obj);
    const auto res = run_ranking_experiment(model, n, dcfg, run.seed(), opts, true, top_k);

    const fs::path dir = out_dir.empty() ? fs::path(run.cfg.output_dir()) / ("experiment-" + model_name) : fs::path(out_dir);
    fs::create_directories(dir);
    auto put = [&](const std::string& name, const std::string& content) {
        const auto p = dir / name;
        Run::write_file(p, content);
        run.outputs.push_back(p);
    };
    {
        std::ostringstream os;
        save_jsonl(os, res.sample, model.kernel.T());
        put("samples.jsonl", os.str());
    }
    for (const auto& [name, rep] : res.rankings) put("ranking_" + name + ".csv", ranking_csv(rep, res.sample));
    put("top_bottom.csv", top_bottom_csv(res));
    put("curves.csv", curves_csv(res));
    put("center.json", to_json(res.center).dump(2) + "\n");
    put("center_table.csv", center_table_csv(res));
    json timing;
    for (const auto& row : res.center_table) timing[row.method] = row.wall_seconds;
    put("timing.json", timing.dump(2) + "\n");
    Run::write_file(dir / "manifest.json", run.manifest_body(dir).dump(2) + "\n");
    std::cout << center_summary(res.center_table);
    std::cout << "outputs written to " << dir.string() << '\n';
    return 0;
}

int cmd_check(Run& run, double T, std::size_t triples) {
    const auto spec = kernel_for(run.cfg, T);
    const auto rep = check_properness(spec, 5, 512, run.seed());
    bool ok = rep.all_pass();
    auto line = [](const char* name, const ConditionResult& c) {
        std::cout << (c.pass ? "PASS " : "FAIL ") << name << ": " << c.evidence << '\n';
    };
    line("continuity/non-negativity", rep.continuous_nonnegative);
    line("positive at zero", rep.positive_at_zero);
    line("linear independence", rep.linear_independence);
    line("scale invariance", rep.scale_invariance);

    Rng rng = make_stream(run.seed(), 99);
    std::uniform_int_distribution<int> count(0, 12);
    std::uniform_real_distribution<double> pos(0.0, T);
    auto draw = [&] {
        std::vector<double> ev(static_cast<std::size_t>(count(rng)));
        for (double& e : ev) e = pos(rng);
        std::sort(ev.begin(), ev.end());
        return ev;
    };
    std::size_t neg = 0, asym = 0, tri = 0, ident = 0;
    for (std::size_t i = 0; i < triples; ++i) {
        const auto a = draw(), b = draw(), c = draw();
        const double ab = lp_distance(a, b, spec), ba = lp_distance(b, a, spec);
        const double ac = lp_distance(a, c, spec), bc = lp_distance(b, c, spec);
        if (ab < 0.0 || ac < 0.0 || bc < 0.0) ++neg;
        if (std::abs(ab - ba) > 1e-12) ++asym;
        if (ab + bc - ac < -1e-10) ++tri;
        if (lp_distance(a, a, spec) != 0.0) ++ident;
    }
    const bool metric_ok = neg == 0 && asym == 0 && tri == 0 && ident == 0;
    std::cout << (metric_ok ? "PASS " : "FAIL ") << "metric axioms on " << triples << " random triples: " << neg
              << " negative, " << asym << " asymmetric, " << tri << " triangle violations, " << ident
              << " nonzero self-distances\n";
    ok = ok && metric_ok;
    return ok ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Depth, distance and center estimation for point processes on [0, T]"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", ppdepth::version);

    Overrides ov;
    std::string config_path;
    std::optional<unsigned> threads;
    std::string log_level = "info";
    app.add_option("--config", config_path, "Flat key = value config file (flags override it)");
    app.add_option("--threads", threads, "Worker thread cap (results do not depend on it)");
    app.add_option("--log-level", log_level, "debug|info|warn|error|off")
        ->check(CLI::IsMember({"debug", "info", "warn", "error", "off"}));

    auto kernel_flags = [&](CLI::App* sub) {
        ov.add<double>(sub, "--c1", "kernel.c1", "Kernel constant c1");
        ov.add<double>(sub, "--c2", "kernel.c2", "Kernel constant c2");
    };
    auto seed_flag = [&](CLI::App* sub) { ov.add<std::uint64_t>(sub, "--seed", "seed", "Seed"); };
    auto depth_flags = [&](CLI::App* sub) {
        sub->set_help_flag("--help", "Print this help message and exit");
        ov.add<std::string>(sub, "--method", "depth.method", "h_depth|modified_h_depth|modified_band_depth");
        ov.add<double>(sub, "--h", "depth.h", "Fixed bandwidth h (implies --h-rule fixed)");
        ov.add<std::string>(sub, "--h-rule", "depth.h_rule", "fixed|proportional_to_T");
        ov.add<double>(sub, "--C", "depth.C", "C in h = C T");
        ov.add<double>(sub, "--p", "depth.p", "L^p exponent");
        ov.add_flag(sub, "--leave-one-out", "depth.leave_one_out", "Exclude each member from its own sample");
    };
    auto center_flags = [&](CLI::App* sub) {
        ov.add<std::size_t>(sub, "--n-max", "center.n_max", "Annealing iterations");
        ov.add<double>(sub, "--anneal-c", "center.anneal_c", "Cooling constant c in c / log(1 + i)");
        ov.add<std::size_t>(sub, "--dr", "center.dr", "Dimensions kept from annealing");
        ov.add<std::size_t>(sub, "--batch", "sgd.batch", "Minibatch size");
        ov.add<double>(sub, "--rate", "sgd.rate", "Initial step size");
        ov.add<std::size_t>(sub, "--epochs", "sgd.epochs", "Epoch limit");
        ov.add<double>(sub, "--eps", "sgd.eps", "Convergence threshold on the epoch gain");
    };

    // simulate
    auto* sim = app.add_subcommand("simulate", "Draw HPP or IPP realizations");
    std::string sim_model = "hpp", sim_mixture = "3:25:10,2:75:10", sim_out, sim_format;
    sim->add_option("--model", sim_model, "hpp|ipp")->check(CLI::IsMember({"hpp", "ipp"}));
    ov.add<double>(sim, "--lambda", "simulate.lambda", "HPP intensity");
    sim->add_option("--mixture", sim_mixture, "IPP intensity as w:mu:sigma[,...]");
    ov.add<double>(sim, "--T", "simulate.T", "Interval length");
    ov.add<std::size_t>(sim, "--n", "experiment.n", "Number of realizations");
    seed_flag(sim);
    sim->add_option("--out", sim_out, "Output file (default: stdout)");
    sim->add_option("--format", sim_format, "jsonl|text");

    // smooth
    auto* smo = app.add_subcommand("smooth", "Evaluate smoothed processes on a grid (CSV t,f,id)");
    DataArgs smo_in;
    std::size_t smo_grid = 201;
    std::string smo_out;
    smo_in.add(smo);
    kernel_flags(smo);
    smo->add_option("--grid", smo_grid, "Grid points over [0, T]");
    smo->add_option("--out", smo_out, "Output CSV (default: stdout)");

    // distance
    auto* dis = app.add_subcommand("distance", "Pairwise d_K,p matrix as CSV");
    std::string dis_a, dis_b, dis_out;
    std::optional<std::string> dis_format;
    std::optional<double> dis_T;
    dis->add_option("--a", dis_a, "Row processes")->required();
    dis->add_option("--b", dis_b, "Column processes (default: --a)");
    dis->add_option("--format", dis_format, "jsonl|text");
    dis->add_option("--T", dis_T, "Override T");
    kernel_flags(dis);
    ov.add<double>(dis, "--p", "depth.p", "L^p exponent");
    dis->add_option("--out", dis_out, "Output CSV (default: stdout)");

    // depth
    auto* dep = app.add_subcommand("depth", "Depth of observations within a sample (CSV id,depth,log_depth,rank)");
    DataArgs dep_in;
    std::string dep_sample, dep_center, dep_out;
    dep_in.add(dep);
    dep->add_option("--sample", dep_sample, "Reference sample (default: --data)");
    dep->add_option("--center-file", dep_center, "Center process for modified_h_depth");
    kernel_flags(dep);
    depth_flags(dep);
    center_flags(dep);
    seed_flag(dep);
    dep->add_option("--out", dep_out, "Output CSV (default: stdout)");

    // rank
    auto* rnk = app.add_subcommand("rank", "Rank a sample by depth");
    DataArgs rnk_in;
    std::string rnk_center, rnk_out;
    std::size_t top_k = 0, bottom_k = 0;
    rnk_in.add(rnk);
    rnk->add_option("--center-file", rnk_center, "Center process for modified_h_depth");
    rnk->add_option("--top-k", top_k, "Keep only the k deepest (with --bottom-k)");
    rnk->add_option("--bottom-k", bottom_k, "Keep only the k least deep (with --top-k)");
    kernel_flags(rnk);
    depth_flags(rnk);
    center_flags(rnk);
    seed_flag(rnk);
    rnk->add_option("--out", rnk_out, "Output CSV (default: stdout)");

    // center
    auto* cen = app.add_subcommand("center", "Estimate the empirical Karcher mean");
    DataArgs cen_in;
    bool cen_report = false;
    std::string cen_intuitive, cen_out;
    cen_in.add(cen);
    ov.add<std::string>(cen, "--method", "center.method", "rjmcmc|line|combined");
    center_flags(cen);
    kernel_flags(cen);
    seed_flag(cen);
    cen->add_flag("--report", cen_report, "Also run every method and print a summary table");
    cen->add_option("--intuitive", cen_intuitive, "Extra reference center for --report, e.g. \"20 40 60 80\"");
    cen->add_option("--out", cen_out, "Output JSON (default: stdout)");

    // classify
    auto* cls = app.add_subcommand("classify", "Depth-based classification with k-fold cross-validation");
    DataArgs cls_in;
    std::string cls_out;
    cls_in.add(cls);
    ov.add<std::size_t>(cls, "--folds", "classify.folds", "Number of folds");
    ov.add<std::string>(cls, "--method", "classify.method", "h_depth|modified_h_depth|modified_band_depth");
    ov.add<std::string>(cls, "--segment", "classify.segments", "Windows as start:end[:c2=..][:c1=..],...");
    cls->set_help_flag("--help", "Print this help message and exit");
    ov.add<double>(cls, "--h", "depth.h", "Fixed bandwidth h");
    ov.add<double>(cls, "--C", "depth.C", "C in h = C T");
    kernel_flags(cls);
    center_flags(cls);
    seed_flag(cls);
    cls->add_option("--out", cls_out, "Output JSON (default: stdout)");

    // experiment
    auto* exp = app.add_subcommand("experiment", "Simulation study: centers, rankings and plot data");
    std::string exp_model, exp_dir;
    exp->add_option("model", exp_model, "hpp|ipp")->required()->check(CLI::IsMember({"hpp", "ipp"}));
    exp->add_option("--out-dir", exp_dir, "Output directory (default: $PPDEPTH_OUTPUT_DIR or .)");
    ov.add<std::size_t>(exp, "--n", "experiment.n", "Sample size");
    ov.add<std::size_t>(exp, "--top-k", "experiment.top_k", "Top/bottom listing size");
    ov.add<double>(exp, "--lambda", "simulate.lambda", "HPP intensity");
    ov.add<double>(exp, "--C", "depth.C", "C in h = C T");
    kernel_flags(exp);
    center_flags(exp);
    seed_flag(exp);

    // check
    auto* chk = app.add_subcommand("check", "Kernel properness suite and metric-axiom spot checks");
    double chk_T = 100.0;
    std::size_t chk_triples = 200;
    chk->add_option("--T", chk_T, "Interval length");
    chk->add_option("--triples", chk_triples, "Random triples for the metric checks");
    kernel_flags(chk);
    seed_flag(chk);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::string what = e.what();
        if (app.get_subcommands().empty()) {
            for (int i = 1; i < argc; ++i) {
                const std::string a = argv[i];
                if (a == "--config" || a == "--threads" || a == "--log-level") {
                    ++i;
                    continue;
                }
                if (a.empty() || a.front() == '-') continue;
                if (!app.get_subcommand_no_throw(a)) what = "unknown subcommand '" + a + "'";
                break;
            }
        }
        std::cerr << "error: " << what << "\n\n" << app.help();
        return 1;
    }

    try {
        const std::map<std::string, log::level> levels = {{"debug", log::level::debug},
                                                          {"info", log::level::info},
                                                          {"warn", log::level::warn},
                                                          {"error", log::level::error},
                                                          {"off", log::level::off}};
        Run run;
        if (!config_path.empty()) {
            run.cfg = RunConfig::load(config_path);
            run.inputs.emplace_back(config_path);
        }
        ov.apply(run.cfg);
        if (run.cfg.has("log.level") && app.get_option("--log-level")->count() == 0)
            log_level = run.cfg.get("log.level", "info");
        log::set_level(levels.count(log_level) ? levels.at(log_level) : log::level::info);
        if (threads) run.cfg.set("threads", std::to_string(*threads));
        if (run.cfg.has("threads")) set_max_threads(static_cast<unsigned>(run.cfg.get_uint("threads", 0)));

        CLI::App* sub = app.get_subcommands().front();
        run.command = sub->get_name();
        log::info("ppdepth " + run.command + " seed=" + std::to_string(run.seed()) + " rng=" + rng_name);

        int code = 0;
        if (sub == sim) {
            code = cmd_simulate(run, sim_model, sim_mixture, sim_out, sim_format);
        } else if (sub == smo) {
            code = cmd_smooth(run, smo_in, smo_grid, smo_out);
        } else if (sub == dis) {
            code = cmd_distance(run, dis_a, dis_b, dis_format, dis_T, dis_out);
        } else if (sub == dep) {
            code = cmd_depth(run, dep_in, dep_sample, dep_center, dep_out);
        } else if (sub == rnk) {
            code = cmd_rank(run, rnk_in, rnk_center, top_k, bottom_k, rnk_out);
        } else if (sub == cen) {
            code = cmd_center(run, cen_in, cen_report, cen_intuitive, cen_out);
        } else if (sub == cls) {
            code = cmd_classify(run, cls_in, cls_out);
        } else if (sub == exp) {
            return cmd_experiment(run, exp_model, exp_dir);
        } else if (sub == chk) {
            return cmd_check(run, chk_T, chk_triples);
        }
        run.write_sidecar_manifest();
        return code;
    } catch (const invalid_input& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const numerical_failure& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
