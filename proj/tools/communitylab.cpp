// communitylab command-line entry point.
//
// Every run writes one manifest: to --manifest FILE when given, to
// <out-dir>/manifest.json for pipeline runs, and otherwise as one JSON line on
// stderr. Randomized stages draw from derive_seed(--seed, "<stage>").
//
// Exit codes: 0 success, 1 stage error, 3 verification failed; CLI11 reports
// usage errors with its own nonzero codes.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "communitylab/communitylab.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace communitylab;

namespace {

class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& msg) : std::runtime_error(msg), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

template <class Fn>
auto stage(const char* tag, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(tag, e.what());
    }
}

std::string hex_digest(const std::string& content) {
    std::ostringstream s;
    s << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << fnv1a(content);
    return s.str();
}

json rational_json(const Rational& r) { return {{"exact", r.str()}, {"decimal", r.to_double()}}; }

Rational parse_rational(const std::string& text, const char* what) {
    try {
        return Rational::parse(text);
    } catch (const std::exception& e) {
        throw ParameterError(std::string(what) + ": " + e.what());
    }
}

/// Per-run bookkeeping: inputs, outputs, manifest, and cleanup on error.
class Run {
public:
    std::string subcommand;
    json params = json::object();
    json summary = json::object();
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string manifest_path;

    Run() : start_(std::chrono::steady_clock::now()) {}

    std::string read_input(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error("cannot open " + path);
        std::ostringstream s;
        s << in.rdbuf();
        inputs_[path] = hex_digest(s.str());
        return s.str();
    }

    /// "-" writes to stdout.
    void write_output(const std::string& path, const std::string& content) {
        if (path == "-") {
            std::cout << content << std::flush;
            outputs_["<stdout>"] = hex_digest(content);
            return;
        }
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error("cannot write " + path);
        written_.push_back(path);
        out << content;
        if (!out.flush()) throw Error("write failed: " + path);
        outputs_[path] = hex_digest(content);
    }

    /// Creates `dir` when missing; it is removed again on failure.
    void ensure_dir(const std::string& dir) {
        if (fs::exists(dir)) {
            if (!fs::is_directory(dir)) throw Error(dir + " exists and is not a directory");
            return;
        }
        fs::create_directories(dir);
        created_dirs_.push_back(dir);
    }

    void rollback() noexcept {
        std::error_code ec;
        for (auto it = written_.rbegin(); it != written_.rend(); ++it) fs::remove(*it, ec);
        for (auto it = created_dirs_.rbegin(); it != created_dirs_.rend(); ++it) fs::remove(*it, ec);
        written_.clear();
    }

    void finish(const std::string& status) {
        const auto ms =
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start_).count();
        json m = {{"subcommand", subcommand},
                  {"parameters", params},
                  {"seed", seed},
                  {"threads", threads},
                  {"budget", default_budget()},
                  {"inputs", inputs_},
                  {"outputs", outputs_},
                  {"wall_clock_ms", ms},
                  {"status", status},
                  {"summary", summary}};
        if (manifest_path.empty()) {
            std::cerr << m.dump() << "\n";
            return;
        }
        std::ofstream out(manifest_path);
        out << m.dump(2) << "\n";
    }

private:
    std::chrono::steady_clock::time_point start_;
    json inputs_ = json::object();
    json outputs_ = json::object();
    std::vector<std::string> written_;
    std::vector<std::string> created_dirs_;
};

// ---------------------------------------------------------------------------
// Loading

LabelCoverInstance load_label_cover(Run& run, const std::string& lc_path, const std::string& cnf_path) {
    if (!lc_path.empty() && !cnf_path.empty()) throw ParameterError("give --labelcover or --cnf, not both");
    if (!lc_path.empty()) {
        std::istringstream in(run.read_input(lc_path));
        return parse_label_cover(in, lc_path);
    }
    if (!cnf_path.empty()) {
        std::istringstream in(run.read_input(cnf_path));
        return reduce_3sat(parse_dimacs(in, cnf_path));
    }
    throw ParameterError("an input instance is required (--labelcover or --cnf)");
}

CommunityGraph load_graph(Run& run, const std::string& path) {
    std::istringstream in(run.read_input(path));
    return read_cgraph(in, path);
}

std::string dump_graph(const CommunityGraph& g) {
    std::ostringstream s;
    write_cgraph(s, g);
    return s.str();
}

// ---------------------------------------------------------------------------
// Options

struct CountingOpts {
    std::uint32_t field = 7, gridsize = 2, mult = 2;
};

struct DecisionOpts {
    std::uint32_t field = 17, gridsize = 0, rho = 1, t = 1;
    std::optional<std::uint32_t> quota_A, quota_B;
    std::uint64_t aux_cap = 16;
    std::string epsilon = "1/4";
    std::string mode = "explicit";
};

struct AnalysisOpts {
    std::string alpha = "1", beta = "1/2";
    std::uint64_t min_size = 1;
    bool strict_ties = false;
    // detector
    std::optional<std::uint32_t> k;
    std::string mode = "exhaustive", sampler = "neighborhood";
    std::optional<std::string> theta;
    std::uint64_t trials = 10000;
    bool open = false, strict = false;
};

void add_counting_opts(CLI::App* app, CountingOpts& o) {
    app->add_option("--field", o.field, "prime p of GF(p)")->capture_default_str();
    app->add_option("--gridsize", o.gridsize, "|F|, grid {0..|F|-1}")->capture_default_str();
    app->add_option("--mult", o.mult, "copies per class m (ε = 1/m)")->capture_default_str();
}

void add_decision_opts(CLI::App* app, DecisionOpts& o) {
    app->add_option("--field", o.field, "prime p of GF(p)")->capture_default_str();
    app->add_option("--gridsize", o.gridsize, "|F|; 0 picks max(ρ, n_A/ρ + n_B/ρ)")->capture_default_str();
    app->add_option("--rho", o.rho, "block size ρ")->capture_default_str();
    app->add_option("--t", o.t, "subset size t")->capture_default_str();
    app->add_option("--quotaA", o.quota_A, "b_A; default t·|F_A|/p");
    app->add_option("--quotaB", o.quota_B, "b_B; default t·|F_B|/p");
    app->add_option("--aux-cap", o.aux_cap, "cap on aux multiplicity")->capture_default_str();
    app->add_option("--epsilon", o.epsilon, "completeness ε")->capture_default_str();
    app->add_option("--mode", o.mode, "explicit|oracle")
        ->check(CLI::IsMember({"explicit", "oracle"}))
        ->capture_default_str();
}

void add_community_opts(CLI::App* app, AnalysisOpts& o) {
    app->add_option("--alpha", o.alpha, "α as p/q or decimal")->capture_default_str();
    app->add_option("--beta", o.beta, "β as p/q or decimal")->capture_default_str();
    app->add_option("--min-size", o.min_size, "smallest community size")->capture_default_str();
}

void add_detector_opts(CLI::App* app, AnalysisOpts& o) {
    app->add_option("--k", o.k, "tuple size; default ⌈ln n/(α-β)²⌉");
    app->add_option("--mode", o.mode, "exhaustive|sampled")
        ->check(CLI::IsMember({"exhaustive", "sampled"}))
        ->capture_default_str();
    app->add_option("--trials", o.trials, "sampled tuples")->capture_default_str();
    app->add_option("--theta", o.theta, "threshold θ; default (α+β)/2");
    app->add_option("--sampler", o.sampler, "neighborhood|uniform")
        ->check(CLI::IsMember({"neighborhood", "uniform"}))
        ->capture_default_str();
    app->add_flag("--open", o.open, "tuple entries do not count toward their own group");
    app->add_flag("--strict", o.strict, "require score > θk");
}

json params_json(const CountingOpts& o) { return {{"field", o.field}, {"gridsize", o.gridsize}, {"mult", o.mult}}; }

json params_json(const DecisionOpts& o) {
    json j = {{"field", o.field}, {"gridsize", o.gridsize}, {"rho", o.rho},         {"t", o.t},
              {"aux_cap", o.aux_cap}, {"epsilon", o.epsilon}, {"mode", o.mode}};
    if (o.quota_A) j["quotaA"] = *o.quota_A;
    if (o.quota_B) j["quotaB"] = *o.quota_B;
    return j;
}

json params_json(const AnalysisOpts& o) {
    json j = {{"alpha", o.alpha}, {"beta", o.beta}, {"min_size", o.min_size}, {"strict_ties", o.strict_ties}};
    return j;
}

json detector_params_json(const AnalysisOpts& o) {
    json j = params_json(o);
    j.update({{"mode", o.mode}, {"trials", o.trials}, {"sampler", o.sampler}, {"open", o.open}, {"strict", o.strict}});
    if (o.k) j["k"] = *o.k;
    if (o.theta) j["theta"] = *o.theta;
    return j;
}

DecisionParams decision_params(const LabelCoverInstance& inst, const DecisionOpts& o) {
    if (o.rho == 0) throw ParameterError("ρ must be positive");
    std::uint32_t grid = o.gridsize;
    if (grid == 0) grid = std::max(o.rho, inst.n_A / o.rho + inst.n_B / o.rho);
    auto p = DecisionParams::make(inst, o.field, grid, o.rho, o.t, 0, 0);
    p.quota_A = o.quota_A ? *o.quota_A : DecisionParams::derived_quota(o.t, p.grid_A.size(), o.field);
    p.quota_B = o.quota_B ? *o.quota_B : DecisionParams::derived_quota(o.t, p.grid_B.size(), o.field);
    p.aux_cap = o.aux_cap;
    p.epsilon = parse_rational(o.epsilon, "--epsilon");
    return p;
}

// ---------------------------------------------------------------------------
// Analyses shared by the standalone subcommands and the pipeline

Rational effective_beta(const CommunityGraph& g, const Rational& beta, bool strict_ties) {
    return strict_ties ? strict_weak_tie_bound(beta, g.vertex_count()) : beta;
}

json analysis_header(const Rational& alpha, const Rational& beta, const Rational& beta_eff, const AnalysisOpts& o) {
    return {{"alpha", rational_json(alpha)},
            {"beta", rational_json(beta)},
            {"beta_effective", rational_json(beta_eff)},
            {"min_size", o.min_size},
            {"strict_ties", o.strict_ties}};
}

json run_count(const CommunityGraph& g, const Rational& alpha, const Rational& beta, const AnalysisOpts& o) {
    const auto b = effective_beta(g, beta, o.strict_ties);
    json r = analysis_header(alpha, beta, b, o);
    r["count"] = count_communities(g, alpha, b, o.min_size).str();
    return r;
}

json run_enumerate(const CommunityGraph& g, const Rational& alpha, const Rational& beta, const AnalysisOpts& o) {
    const auto b = effective_beta(g, beta, o.strict_ties);
    json r = analysis_header(alpha, beta, b, o);
    json list = json::array();
    BigCount total = 0;
    for (const auto& s : enumerate_communities(g, alpha, b, o.min_size)) {
        const auto w = labeled_weight(g, s);
        total += w;
        list.push_back({{"counts", s.counts}, {"labeled_weight", w.str()}, {"profile", profile_to_json(profile(g, s))}});
    }
    r["count_vectors"] = list.size();
    r["count"] = total.str();
    r["communities"] = std::move(list);
    return r;
}

json run_maxgap(const CommunityGraph& g) {
    const auto r = max_gap(g);
    return {{"epsilon", rational_json(r.epsilon)}, {"witness", r.witness.counts}, {"profile", profile_to_json(r.profile)}};
}

json run_verify(const CommunityGraph& g, const SubsetSelection& s, const Rational& alpha, const Rational& beta,
                const AnalysisOpts& o) {
    const auto b = effective_beta(g, beta, o.strict_ties);
    const auto p = profile(g, s);
    json r = analysis_header(alpha, beta, b, o);
    r["pass"] = satisfies(p, alpha, b) && p.size >= o.min_size;
    r["profile"] = profile_to_json(p);
    return r;
}

DetectorConfig detector_config(const CommunityGraph& g, const Rational& alpha, const Rational& beta,
                               const AnalysisOpts& o, std::uint64_t seed, unsigned threads) {
    DetectorConfig cfg;
    cfg.k = o.k ? *o.k : default_tuple_size(g.vertex_count(), alpha, beta);
    if (o.theta) cfg.theta = parse_rational(*o.theta, "--theta");
    cfg.mode = o.mode == "sampled" ? DetectorMode::sampled : DetectorMode::exhaustive;
    cfg.sampler = o.sampler == "uniform" ? TupleSampler::uniform : TupleSampler::neighborhood;
    cfg.trials = o.trials;
    cfg.seed = derive_seed(seed, "detect");
    cfg.closed = !o.open;
    cfg.strict = o.strict;
    cfg.min_size = o.min_size;
    cfg.threads = threads;
    return cfg;
}

/// JSON lines: one record per community, then a summary record.
std::string run_detect(const CommunityGraph& g, const Rational& alpha, const Rational& beta, const DetectorConfig& cfg,
                       json& summary) {
    const auto res = detect(g, alpha, beta, cfg);
    std::string out;
    for (const auto& c : res.communities)
        out += json({{"counts", c.selection.counts}, {"profile", profile_to_json(c.profile)}}).dump() + "\n";
    summary = {{"communities", res.communities.size()},
               {"tuples", res.tuples},
               {"distinct_candidates", res.distinct_candidates},
               {"k", cfg.k},
               {"theta", rational_json(detail::resolve_theta(cfg, alpha, beta))},
               {"stage_seed", cfg.seed}};
    out += json({{"summary", summary}}).dump() + "\n";
    return out;
}

SubsetSelection load_selection(Run& run, const std::string& path, const CommunityGraph& g) {
    const auto text = run.read_input(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(path, 1, e.what());
    }
    return selection_from_json(j, g);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"communitylab: (α,β)-community verification, enumeration, detection and hardness gadgets"};
    app.require_subcommand(1);
    app.fallthrough();
    Run run;
    app.add_option("--seed", run.seed, "root seed for every randomized stage")->capture_default_str();
    app.add_option("--threads", run.threads, "worker cap")->capture_default_str();
    app.add_option("--manifest", run.manifest_path, "manifest file (default: one JSON line on stderr)");

    // gen --------------------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "generate instances")->require_subcommand(1);
    std::string gen_out;
    std::uint32_t g3_vars = 3, g3_clauses = 1;
    auto* gen3 = gen->add_subcommand("random-3sat", "random 3-CNF with distinct variables per clause");
    gen3->add_option("--vars", g3_vars)->capture_default_str();
    gen3->add_option("--clauses", g3_clauses)->capture_default_str();
    gen3->add_option("--out", gen_out, "DIMACS file")->required();

    std::uint32_t gp_n = 200, gp_k = 30;
    std::string gp_p = "0.05";
    auto* genp = gen->add_subcommand("planted-community", "G(n,p) with a planted clique; plant in <out>.plant.json");
    genp->add_option("--n", gp_n)->capture_default_str();
    genp->add_option("--p", gp_p)->capture_default_str();
    genp->add_option("--k", gp_k, "plant size")->capture_default_str();
    genp->add_option("--out", gen_out, "cgraph file")->required();

    std::uint32_t gb_nA = 100, gb_nB = 100, gb_dA = 5, gb_dB = 5, gb_sA = 2, gb_sB = 2;
    auto* genb = gen->add_subcommand("random-biregular-lc", "random bi-regular Label Cover instance");
    genb->add_option("--nA", gb_nA)->capture_default_str();
    genb->add_option("--nB", gb_nB)->capture_default_str();
    genb->add_option("--dA", gb_dA)->capture_default_str();
    genb->add_option("--dB", gb_dB)->capture_default_str();
    genb->add_option("--sigmaA", gb_sA)->capture_default_str();
    genb->add_option("--sigmaB", gb_sB)->capture_default_str();
    genb->add_option("--out", gen_out, "labelcover file")->required();

    // reduce -----------------------------------------------------------------
    auto* reduce = app.add_subcommand("reduce", "build a community graph from a Label Cover instance")
                       ->require_subcommand(1);
    std::string lc_path, cnf_path, out_path = "-";
    CountingOpts copts;
    auto* rc = reduce->add_subcommand("counting", "counting-reduction graph");
    rc->add_option("--labelcover", lc_path, "labelcover file");
    rc->add_option("--cnf", cnf_path, "DIMACS file, reduced to Label Cover first");
    rc->add_option("--out", out_path, "cgraph file, '-' for stdout")->capture_default_str();
    add_counting_opts(rc, copts);

    DecisionOpts dopts;
    auto* rd = reduce->add_subcommand("decision", "decision-reduction graph");
    rd->add_option("--labelcover", lc_path, "labelcover file");
    rd->add_option("--cnf", cnf_path, "DIMACS file, reduced to Label Cover first");
    rd->add_option("--out", out_path, "cgraph file (explicit) or metadata JSON (oracle)")->capture_default_str();
    add_decision_opts(rd, dopts);
    GroupId edge_v1 = 0, edge_v2 = 0;
    auto* rde = rd->add_subcommand("edge", "query adjacency of two group ids without materializing");
    rde->add_option("V1", edge_v1)->required();
    rde->add_option("V2", edge_v2)->required();

    // partition --------------------------------------------------------------
    std::uint32_t part_rho = 1, part_retries = 10;
    auto* part = app.add_subcommand("partition", "random block partition with certificate (JSON lines)");
    part->add_option("--labelcover", lc_path, "labelcover file")->required();
    part->add_option("--rho", part_rho)->capture_default_str();
    part->add_option("--retries", part_retries)->capture_default_str();
    part->add_option("--out", out_path)->capture_default_str();

    // graph analyses ---------------------------------------------------------
    std::string graph_path, community_path;
    AnalysisOpts aopts;
    auto* det = app.add_subcommand("detect", "detector; one JSON line per verified community");
    auto* en = app.add_subcommand("enumerate", "all (α,β)-communities");
    auto* cnt = app.add_subcommand("count", "number of labeled (α,β)-communities");
    auto* mg = app.add_subcommand("maxgap", "max over subsets of α*-β*");
    auto* ver = app.add_subcommand("verify", "check one selection; exit 3 when it is not a community");
    for (auto* sc : {det, en, cnt, mg, ver}) {
        sc->add_option("--graph", graph_path, "cgraph file")->required();
        sc->add_option("--out", out_path)->capture_default_str();
    }
    for (auto* sc : {det, en, cnt, ver}) add_community_opts(sc, aopts);
    for (auto* sc : {en, cnt, ver}) sc->add_flag("--strict-ties", aopts.strict_ties, "treat β as strict");
    add_detector_opts(det, aopts);
    ver->add_option("--community", community_path, "selection JSON")->required();

    // pipeline ---------------------------------------------------------------
    std::string pl_reduction = "counting", pl_analysis = "count", pl_out_dir;
    bool pl_alpha_set = false, pl_beta_set = false;
    auto* pl = app.add_subcommand("pipeline", "3SAT → Label Cover → community graph → analysis");
    pl->add_option("--cnf", cnf_path, "DIMACS file")->required();
    pl->add_option("--reduction", pl_reduction)->check(CLI::IsMember({"counting", "decision"}))->capture_default_str();
    pl->add_option("--analysis", pl_analysis)
        ->check(CLI::IsMember({"count", "enumerate", "detect", "maxgap", "verify"}))
        ->capture_default_str();
    pl->add_option("--out-dir", pl_out_dir, "directory for graph, report, completeness selection and manifest")
        ->required();
    pl->add_option("--community", community_path, "selection JSON for --analysis verify");
    pl->add_option("--field", copts.field, "prime p (default 7 counting, 17 decision)");
    pl->add_option("--gridsize", copts.gridsize, "|F|")->capture_default_str();
    pl->add_option("--mult", copts.mult, "counting: m")->capture_default_str();
    pl->add_option("--rho", dopts.rho, "decision: ρ")->capture_default_str();
    pl->add_option("--t", dopts.t, "decision: t")->capture_default_str();
    pl->add_option("--quotaA", dopts.quota_A, "decision: b_A");
    pl->add_option("--quotaB", dopts.quota_B, "decision: b_B");
    pl->add_option("--aux-cap", dopts.aux_cap, "decision: aux cap")->capture_default_str();
    pl->add_option("--epsilon", dopts.epsilon, "decision: ε")->capture_default_str();
    pl->add_option("--alpha", aopts.alpha, "default 1");
    pl->add_option("--beta", aopts.beta, "default ε of the reduction");
    pl->add_option("--min-size", aopts.min_size)->capture_default_str();
    pl->add_flag("--strict-ties", aopts.strict_ties, "treat β as strict");
    add_detector_opts(pl, aopts);
    pl->get_option("--mode")->description("detector mode: exhaustive|sampled");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    int code = 0;
    try {
        // gen ----------------------------------------------------------------
        if (gen3->parsed()) {
            run.subcommand = "gen random-3sat";
            run.params = {{"vars", g3_vars}, {"clauses", g3_clauses}, {"out", gen_out}};
            const auto f = stage("gen", [&] { return random_3sat(g3_vars, g3_clauses, derive_seed(run.seed, "gen")); });
            std::ostringstream s;
            write_dimacs(s, f);
            stage("write", [&] { run.write_output(gen_out, s.str()); });
            run.summary = {{"vars", f.num_vars}, {"clauses", f.clauses.size()}};
        } else if (genp->parsed()) {
            run.subcommand = "gen planted-community";
            run.params = {{"n", gp_n}, {"p", gp_p}, {"k", gp_k}, {"out", gen_out}};
            const auto pi = stage("gen", [&] {
                const double p = parse_rational(gp_p, "--p").to_double();
                return planted_community(gp_n, p, gp_k, derive_seed(run.seed, "gen"));
            });
            const auto prof = profile(pi.graph, SubsetSelection::whole_groups(pi.graph, pi.plant));
            const json side = {{"groups", pi.plant}, {"profile", profile_to_json(prof)}};
            stage("write", [&] {
                run.write_output(gen_out, dump_graph(pi.graph));
                run.write_output(gen_out + ".plant.json", side.dump(2) + "\n");
            });
            run.summary = {{"vertices", pi.graph.vertex_count()},
                           {"edges", pi.graph.group_edge_count()},
                           {"plant_profile", profile_to_json(prof)}};
        } else if (genb->parsed()) {
            run.subcommand = "gen random-biregular-lc";
            run.params = {{"nA", gb_nA}, {"nB", gb_nB}, {"dA", gb_dA}, {"dB", gb_dB},
                          {"sigmaA", gb_sA}, {"sigmaB", gb_sB}, {"out", gen_out}};
            const auto inst = stage("gen", [&] {
                auto i = random_biregular_lc(gb_nA, gb_nB, gb_dA, gb_dB, gb_sA, gb_sB, derive_seed(run.seed, "gen"));
                i.validate();
                return i;
            });
            std::ostringstream s;
            write_label_cover(s, inst);
            stage("write", [&] { run.write_output(gen_out, s.str()); });
            run.summary = {{"edges", inst.edges.size()}};

            // reduce -------------------------------------------------------------
        } else if (rc->parsed()) {
            run.subcommand = "reduce counting";
            run.params = params_json(copts);
            run.params.update({{"labelcover", lc_path}, {"cnf", cnf_path}, {"out", out_path}});
            const auto inst = stage("parse", [&] { return load_label_cover(run, lc_path, cnf_path); });
            const CountingReduction red = stage("reduce", [&] {
                return CountingReduction(inst, CountingParams::make(copts.field, copts.gridsize, copts.mult));
            });
            const auto g = stage("build", [&] { return red.build(); });
            stage("write", [&] { run.write_output(out_path, dump_graph(g)); });
            run.summary = g.metadata();
            run.summary["group_edges"] = g.group_edge_count();
        } else if (rd->parsed()) {
            run.subcommand = rde->parsed() ? "reduce decision edge" : "reduce decision";
            run.params = params_json(dopts);
            run.params.update({{"labelcover", lc_path}, {"cnf", cnf_path}, {"out", out_path}});
            const auto inst = stage("parse", [&] { return load_label_cover(run, lc_path, cnf_path); });
            const DecisionReduction red =
                stage("reduce", [&] { return DecisionReduction(inst, decision_params(inst, dopts)); });
            if (rde->parsed()) {
                run.params.update({{"V1", edge_v1}, {"V2", edge_v2}});
                const bool adj = stage("query", [&] {
                    if (edge_v1 >= red.group_count() || edge_v2 >= red.group_count())
                        throw ParameterError("group id out of range (group count " +
                                             std::to_string(red.group_count()) + ")");
                    return red.edge_predicate(edge_v1, edge_v2);
                });
                run.summary = {{"V1", edge_v1}, {"V2", edge_v2}, {"adjacent", adj}};
                stage("write", [&] { run.write_output(out_path, run.summary.dump() + "\n"); });
            } else if (dopts.mode == "oracle") {
                const auto g = stage("build", [&] { return red.build(GraphMode::oracle); });
                run.summary = red.metadata();
                run.summary["groups"] = g.group_count();
                run.summary["vertices"] = g.vertex_count();
                stage("write", [&] { run.write_output(out_path, run.summary.dump(2) + "\n"); });
            } else {
                const auto g = stage("build", [&] { return red.build(GraphMode::explicit_edges); });
                stage("write", [&] { run.write_output(out_path, dump_graph(g)); });
                run.summary = red.metadata();
                run.summary["group_edges"] = g.group_edge_count();
            }

            // partition ----------------------------------------------------------
        } else if (part->parsed()) {
            run.subcommand = "partition";
            run.params = {{"labelcover", lc_path}, {"rho", part_rho}, {"retries", part_retries}, {"out", out_path}};
            const auto inst = stage("parse", [&] { return load_label_cover(run, lc_path, ""); });
            const auto [partition, report] = stage("partition", [&] {
                if (part_rho == 0) throw ParameterError("ρ must be positive");
                return random_partition(inst, contiguous_blocks(inst.n_B, part_rho), part_rho,
                                        derive_seed(run.seed, "partition"), part_retries);
            });
            std::string lines;
            for (std::size_t i = 0; i < report.pair_counts.size(); ++i)
                for (std::size_t j = 0; j < report.pair_counts[i].size(); ++j)
                    lines += json({{"i", i},
                                   {"j", j},
                                   {"edges", report.pair_counts[i][j]},
                                   {"target", rational_json(report.target)},
                                   {"block_size", report.block_sizes[i]},
                                   {"size_ok", report.size_ok(i)},
                                   {"mass_ok", report.mass_ok(i, j)}})
                                 .dump() +
                             "\n";
            run.summary = {{"pass", report.pass},
                           {"blocks", partition.blocks.size()},
                           {"size_violations", report.size_violations},
                           {"mass_violations", report.mass_violations},
                           {"attempt_seed", partition.seed},
                           {"notes", report.notes}};
            lines += json({{"summary", run.summary}}).dump() + "\n";
            stage("write", [&] { run.write_output(out_path, lines); });

            // analyses -----------------------------------------------------------
        } else if (det->parsed() || en->parsed() || cnt->parsed() || mg->parsed() || ver->parsed()) {
            const auto g = stage("parse", [&] { return load_graph(run, graph_path); });
            run.params = det->parsed() ? detector_params_json(aopts) : params_json(aopts);
            run.params.update({{"graph", graph_path}, {"out", out_path}});
            Rational alpha, beta;
            stage("parse", [&] {
                alpha = parse_rational(aopts.alpha, "--alpha");
                beta = parse_rational(aopts.beta, "--beta");
            });
            if (det->parsed()) {
                run.subcommand = "detect";
                json summary;
                const auto text = stage("detect", [&] {
                    return run_detect(g, alpha, beta, detector_config(g, alpha, beta, aopts, run.seed, run.threads),
                                      summary);
                });
                run.summary = summary;
                stage("write", [&] { run.write_output(out_path, text); });
            } else {
                json r;
                if (en->parsed()) {
                    run.subcommand = "enumerate";
                    r = stage("enumerate", [&] { return run_enumerate(g, alpha, beta, aopts); });
                    run.summary = {{"count", r["count"]}, {"count_vectors", r["count_vectors"]}};
                } else if (cnt->parsed()) {
                    run.subcommand = "count";
                    r = stage("count", [&] { return run_count(g, alpha, beta, aopts); });
                    run.summary = {{"count", r["count"]}};
                } else if (mg->parsed()) {
                    run.subcommand = "maxgap";
                    run.params = {{"graph", graph_path}, {"out", out_path}};
                    r = stage("maxgap", [&] { return run_maxgap(g); });
                    run.summary = {{"epsilon", r["epsilon"]}};
                } else {
                    run.subcommand = "verify";
                    run.params["community"] = community_path;
                    r = stage("verify", [&] {
                        return run_verify(g, load_selection(run, community_path, g), alpha, beta, aopts);
                    });
                    run.summary = {{"pass", r["pass"]}};
                }
                stage("write", [&] { run.write_output(out_path, r.dump(2) + "\n"); });
                if (ver->parsed() && !r["pass"].get<bool>()) code = 3;
            }

            // pipeline -----------------------------------------------------------
        } else if (pl->parsed()) {
            run.subcommand = "pipeline";
            const bool counting = pl_reduction == "counting";
            if (!counting && !pl->get_option("--field")->count()) copts.field = 17;
            dopts.field = copts.field;
            dopts.gridsize = pl->get_option("--gridsize")->count() ? copts.gridsize : 0;
            pl_alpha_set = pl->get_option("--alpha")->count() > 0;
            pl_beta_set = pl->get_option("--beta")->count() > 0;
            run.params = counting ? params_json(copts) : params_json(dopts);
            run.params.update(detector_params_json(aopts));
            run.params.update({{"cnf", cnf_path},
                               {"reduction", pl_reduction},
                               {"analysis", pl_analysis},
                               {"out_dir", pl_out_dir},
                               {"community", community_path}});
            if (!pl_alpha_set) run.params.erase("alpha");
            if (!pl_beta_set) run.params.erase("beta");
            const std::string dir = pl_out_dir;
            run.manifest_path = (fs::path(dir) / "manifest.json").string();
            stage("setup", [&] {
                if (pl_analysis == "verify" && community_path.empty())
                    throw ParameterError("--analysis verify needs --community");
                run.ensure_dir(dir);
            });

            const auto formula = stage("parse", [&] {
                std::istringstream in(run.read_input(cnf_path));
                return parse_dimacs(in, cnf_path);
            });
            const auto inst = stage("reduce_3sat", [&] { return reduce_3sat(formula); });

            std::optional<CountingReduction> cred;
            std::optional<DecisionReduction> dred;
            CommunityGraph g;
            Rational eps;
            stage("build", [&] {
                if (counting) {
                    cred.emplace(inst, CountingParams::make(copts.field, copts.gridsize, copts.mult));
                    g = cred->build();
                    eps = cred->params().epsilon();
                } else {
                    dred.emplace(inst, decision_params(inst, dopts));
                    g = dred->build(GraphMode::explicit_edges);
                    eps = dred->params().epsilon;
                }
            });
            stage("write", [&] { run.write_output((fs::path(dir) / "graph.cgraph").string(), dump_graph(g)); });

            // Completeness selection for the first satisfying labeling, if any.
            json completeness = nullptr;
            stage("completeness", [&] {
                std::optional<Labeling> first;
                enumerate_satisfying(inst, [&](const Labeling& l) {
                    if (!first) first = l;
                });
                if (!first) return;
                const auto s = counting ? cred->community_from_labeling(*first) : dred->community_from_labeling(*first);
                completeness = selection_to_json(s);
                run.write_output((fs::path(dir) / "completeness.json").string(), completeness.dump() + "\n");
            });

            const Rational alpha = pl_alpha_set ? parse_rational(aopts.alpha, "--alpha") : Rational(1);
            const Rational beta = pl_beta_set ? parse_rational(aopts.beta, "--beta") : eps;
            json report = {{"reduction", pl_reduction},
                           {"graph", g.metadata()},
                           {"groups", g.group_count()},
                           {"vertices", g.vertex_count()},
                           {"sat_count", std::to_string(count_labelings_bruteforce(inst))}};
            if (pl_analysis == "count") {
                report["analysis"] = stage("count", [&] { return run_count(g, alpha, beta, aopts); });
                report["count"] = report["analysis"]["count"];
            } else if (pl_analysis == "enumerate") {
                report["analysis"] = stage("enumerate", [&] { return run_enumerate(g, alpha, beta, aopts); });
                report["count"] = report["analysis"]["count"];
            } else if (pl_analysis == "maxgap") {
                report["analysis"] = stage("maxgap", [&] { return run_maxgap(g); });
            } else if (pl_analysis == "detect") {
                json summary;
                const auto text = stage("detect", [&] {
                    return run_detect(g, alpha, beta, detector_config(g, alpha, beta, aopts, run.seed, run.threads),
                                      summary);
                });
                stage("write", [&] { run.write_output((fs::path(dir) / "detect.jsonl").string(), text); });
                report["analysis"] = summary;
            } else {
                report["analysis"] = stage("verify", [&] {
                    return run_verify(g, load_selection(run, community_path, g), alpha, beta, aopts);
                });
                report["pass"] = report["analysis"]["pass"];
                if (!report["pass"].get<bool>()) code = 3;
            }
            run.summary = {{"analysis", pl_analysis}};
            for (const char* key : {"count", "pass"})
                if (report.contains(key)) run.summary[key] = report[key];
            const auto text = report.dump(2) + "\n";
            stage("write", [&] {
                run.write_output((fs::path(dir) / "report.json").string(), text);
                run.write_output("-", text);
            });
        }
    } catch (const StageError& e) {
        std::cerr << "communitylab: error [" << e.stage() << "]: " << e.what() << "\n";
        run.rollback();
        run.summary = {{"stage", e.stage()}, {"error", e.what()}};
        if (!run.manifest_path.empty() && !fs::exists(fs::path(run.manifest_path).parent_path())) run.manifest_path.clear();
        run.finish("error");
        return 1;
    }
    run.finish(code == 0 ? "ok" : "verify_failed");
    return code;
}
