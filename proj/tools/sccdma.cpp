// sccdma: command-line front end.
//
//   sccdma generate  --L 64 --W 2 --p 0.1 --c 2 --tau 14 --seed 7 --out g.json
//   sccdma de        --graph g.json --snr-db 10 --alpha-tr 1.45 --alpha 1.98 --out-prefix run
//   sccdma threshold --uncoupled --snr-db 10
//   sccdma search    --L 64 --W 2 --p 0.1 --c 2 --tau 14 --samples 200 --seed 1 --out report.csv
//   sccdma avgload   --alpha-tr 1.45 --alpha 1.98958 --tau 14 --L 64
//
// Data goes to files or stdout; diagnostics go to stderr.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sccdma/sccdma.hpp"

namespace {

using namespace sccdma;

std::vector<int> parse_index_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) throw ConfigError("empty entry in --training-set");
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(item.substr(b, e - b + 1), &used);
        } catch (const std::exception&) {
            throw ConfigError("--training-set entry '" + item + "' is not an integer");
        }
        if (used != e - b + 1) throw ConfigError("--training-set entry '" + item + "' is not an integer");
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError("--training-set is empty");
    return out;
}

MmseFunction mmse_from(const std::string& mode) {
    return mode == "table" ? MmseFunction::tabulated() : MmseFunction::direct();
}

// Shared by de and threshold: either a graph file or the uncoupled system.
struct SystemInput {
    std::string graph_path;
    bool uncoupled = false;
    std::string training_override;

    GraphFile load() const {
        if (uncoupled) throw ConfigError("internal: uncoupled system has no graph");
        auto gf = read_graph_file(graph_path);
        if (!training_override.empty())
            gf.training = TrainingAssignment(gf.graph.size(), parse_index_list(training_override));
        return gf;
    }

    std::pair<BaseMatrix, TrainingAssignment> system() const {
        if (uncoupled) {
            if (!training_override.empty()) throw ConfigError("--training-set cannot be used with --uncoupled");
            return {BaseMatrix::uncoupled(), TrainingAssignment(1, {})};
        }
        auto gf = load();
        return {to_base_matrix(gf.graph), gf.training};
    }
};

void add_system_options(CLI::App* cmd, SystemInput& in) {
    auto* graph = cmd->add_option("--graph", in.graph_path, "Graph file produced by 'generate'");
    auto* unc = cmd->add_flag("--uncoupled", in.uncoupled, "Use the single-position uncoupled system");
    graph->excludes(unc);
    cmd->add_option("--training-set", in.training_override,
                    "Comma-separated factor indices replacing the file's training set");
}

struct GenerateArgs {
    int L = 64, W = 2, c = 2;
    double p = 0.1;
    std::optional<int> tau;
    std::string training;
    std::uint64_t seed = 1;
    std::string out;
};

int cmd_generate(const GenerateArgs& a) {
    std::optional<std::vector<int>> override_set;
    if (!a.training.empty()) override_set = parse_index_list(a.training);
    if (!a.tau && !override_set) throw ConfigError("generate needs --tau or --training-set");
    const int tau = a.tau ? *a.tau : static_cast<int>(override_set->size());

    Rng rng(a.seed);
    auto [g, t] = sw_rewire(make_regular(a.L, a.W), a.p, a.c, tau, rng);
    if (override_set) t = TrainingAssignment(a.L, *override_set);
    write_text_file(a.out, serialize_graph(g, t));
    return 0;
}

struct DeArgs {
    SystemInput in;
    double snr_db = 10.0, alpha_tr = 1.45, alpha = 0.0, tol = default_sir_tol;
    int max_iter = default_max_iter;
    std::string out_prefix, mmse = "direct";
};

int cmd_de(const DeArgs& a) {
    auto [B, training] = a.in.system();
    const SystemScenario scen{sigma2_from_snr_db(a.snr_db), a.alpha_tr, a.alpha, training};
    const auto traj = run_de(B, scen, a.max_iter, a.tol, mmse_from(a.mmse));
    write_text_file(a.out_prefix + "_trajectory.csv", trajectory_csv(traj));
    write_text_file(a.out_prefix + "_summary.csv", summary_csv(traj));
    const auto& s = traj.final_summary();
    std::cout << "converged=" << (traj.converged ? "true" : "false") << " iterations=" << traj.iterations_run
              << " final_avg_ber=" << fmt_real(s.avg_ber) << " final_max_ber=" << fmt_real(s.max_ber) << '\n';
    return 0;
}

struct ThresholdArgs {
    SystemInput in;
    double snr_db = 10.0, alpha_tr = 1.45, alpha_lo = 1.0, alpha_hi = 2.5;
    double alpha_tol = default_alpha_tol, success_ber = default_success_ber, tol = default_sir_tol;
    int max_iter = default_threshold_max_iter;
    std::string out, log, mmse = "direct";
};

int cmd_threshold(const ThresholdArgs& a) {
    auto [B, training] = a.in.system();
    ThresholdQuery q;
    q.B = std::move(B);
    q.training = std::move(training);
    q.sigma2 = sigma2_from_snr_db(a.snr_db);
    q.alpha_tr = a.alpha_tr;
    q.alpha_lo = a.alpha_lo;
    q.alpha_hi = a.alpha_hi;
    q.alpha_tol = a.alpha_tol;
    q.success_ber = a.success_ber;
    q.max_iter = a.max_iter;
    q.sir_tol = a.tol;
    q.mmse = mmse_from(a.mmse);
    const auto r = bp_threshold(q);
    const auto report = threshold_report_csv(r, q);
    if (!a.out.empty()) write_text_file(a.out, report);
    if (!a.log.empty()) write_text_file(a.log, threshold_log_csv(r));
    std::cout << report;
    return 0;
}

struct SearchArgs {
    EnsembleSpec spec;
    double snr_db = 10.0;
    ScoringScenario sc;
    SearchOptions opt;
    std::string out, best_graph, mmse = "table";
};

int cmd_search(SearchArgs a) {
    a.sc.sigma2 = sigma2_from_snr_db(a.snr_db);
    a.sc.mmse = mmse_from(a.mmse);
    const auto rep = ensemble_search(a.spec, a.sc, a.opt);
    write_text_file(a.out, search_report_csv(rep));
    if (!a.best_graph.empty()) write_text_file(a.best_graph, serialize_graph(rep.best.graph, rep.best.training));
    const auto& top = rep.ranked.front();
    std::cout << "best_index=" << top.index << " instance_seed=" << top.instance_seed << " iterations_to_target="
              << (top.iterations_to_target ? std::to_string(*top.iterations_to_target) : not_reached_token)
              << " final_max_ber=" << fmt_real(top.final_max_ber);
    if (top.threshold) std::cout << " alpha_bp=" << fmt_real(top.threshold->alpha_bp);
    std::cout << '\n';
    return 0;
}

struct AvgLoadArgs {
    double alpha_tr = 0.0, alpha = 0.0;
    int tau = 0, L = 0;
};

int cmd_avgload(const AvgLoadArgs& a) {
    std::cout << fmt_real(average_load(a.alpha_tr, a.alpha, a.tau, a.L)) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spatially coupled CDMA: coupling ensembles, density evolution, BP thresholds"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "Draw a (L,W,p,c,tau)-SW instance and write its graph file");
    g->add_option("--L", gen.L, "Chain length")->capture_default_str();
    g->add_option("--W", gen.W, "Coupling width")->capture_default_str();
    g->add_option("--p", gen.p, "Rewiring probability")->capture_default_str();
    g->add_option("--c", gen.c, "Number of clusters")->capture_default_str();
    auto* gtau = g->add_option("--tau", gen.tau, "Training-phase size");
    auto* gts = g->add_option("--training-set", gen.training, "Explicit training indices, e.g. \"61,62,63,0\"");
    gtau->excludes(gts);
    g->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
    g->add_option("--out", gen.out, "Output graph file")->required();

    DeArgs de;
    auto* d = app.add_subcommand("de", "Run density evolution and write trajectory CSVs");
    add_system_options(d, de.in);
    d->add_option("--snr-db", de.snr_db, "1/sigma^2 in dB")->capture_default_str();
    d->add_option("--alpha-tr", de.alpha_tr, "Training-phase load")->capture_default_str();
    d->add_option("--alpha", de.alpha, "Propagation-phase load")->required();
    d->add_option("--max-iter", de.max_iter)->capture_default_str();
    d->add_option("--tol", de.tol, "Convergence tolerance on sir")->capture_default_str();
    d->add_option("--mmse", de.mmse)->check(CLI::IsMember({"direct", "table"}))->capture_default_str();
    d->add_option("--out-prefix", de.out_prefix, "Writes <prefix>_trajectory.csv and <prefix>_summary.csv")
        ->required();

    ThresholdArgs th;
    auto* t = app.add_subcommand("threshold", "Estimate the BP threshold by bisection over alpha");
    add_system_options(t, th.in);
    t->add_option("--snr-db", th.snr_db)->capture_default_str();
    t->add_option("--alpha-tr", th.alpha_tr)->capture_default_str();
    t->add_option("--alpha-lo", th.alpha_lo, "Bracket end that must succeed")->capture_default_str();
    t->add_option("--alpha-hi", th.alpha_hi, "Bracket end that must fail")->capture_default_str();
    t->add_option("--alpha-tol", th.alpha_tol)->capture_default_str();
    t->add_option("--success-ber", th.success_ber)->capture_default_str();
    t->add_option("--max-iter", th.max_iter)->capture_default_str();
    t->add_option("--tol", th.tol)->capture_default_str();
    t->add_option("--mmse", th.mmse)->check(CLI::IsMember({"direct", "table"}))->capture_default_str();
    t->add_option("--out", th.out, "Threshold report CSV");
    t->add_option("--log", th.log, "Evaluation log CSV");

    SearchArgs se;
    auto* s = app.add_subcommand("search", "Score many SW instances and rank them");
    s->add_option("--L", se.spec.L)->capture_default_str();
    s->add_option("--W", se.spec.W)->capture_default_str();
    s->add_option("--p", se.spec.p)->capture_default_str();
    s->add_option("--c", se.spec.c)->capture_default_str();
    s->add_option("--tau", se.spec.tau)->capture_default_str();
    s->add_option("--samples", se.spec.n_samples)->capture_default_str();
    s->add_option("--seed", se.spec.master_seed, "Master seed")->capture_default_str();
    s->add_option("--snr-db", se.snr_db)->capture_default_str();
    s->add_option("--alpha-tr", se.sc.alpha_tr)->capture_default_str();
    s->add_option("--alpha", se.sc.alpha)->capture_default_str();
    s->add_option("--target-ber", se.sc.target_ber)->capture_default_str();
    s->add_option("--max-iter", se.sc.max_iter)->capture_default_str();
    s->add_option("--tol", se.sc.sir_tol)->capture_default_str();
    s->add_option("--workers", se.opt.workers)->check(CLI::PositiveNumber)->capture_default_str();
    s->add_flag("--thresholds", se.opt.with_thresholds, "Estimate BP thresholds for the finalists");
    s->add_option("--finalists", se.opt.finalists)->capture_default_str();
    s->add_option("--alpha-lo", se.opt.alpha_lo)->capture_default_str();
    s->add_option("--alpha-hi", se.opt.alpha_hi)->capture_default_str();
    s->add_option("--alpha-tol", se.opt.alpha_tol)->capture_default_str();
    s->add_option("--success-ber", se.opt.success_ber)->capture_default_str();
    s->add_option("--mmse", se.mmse)->check(CLI::IsMember({"direct", "table"}))->capture_default_str();
    s->add_option("--out", se.out, "Ranked report CSV")->required();
    s->add_option("--best-graph", se.best_graph, "Graph file of the best instance");

    AvgLoadArgs av;
    auto* a = app.add_subcommand("avgload", "Average load for given phase loads and training size");
    a->add_option("--alpha-tr", av.alpha_tr)->required();
    a->add_option("--alpha", av.alpha)->required();
    a->add_option("--tau", av.tau)->required();
    a->add_option("--L", av.L)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*g) return cmd_generate(gen);
        if (*d) {
            if (de.in.graph_path.empty() && !de.in.uncoupled) throw ConfigError("de needs --graph or --uncoupled");
            return cmd_de(de);
        }
        if (*t) {
            if (th.in.graph_path.empty() && !th.in.uncoupled)
                throw ConfigError("threshold needs --graph or --uncoupled");
            return cmd_threshold(th);
        }
        if (*s) return cmd_search(se);
        if (*a) return cmd_avgload(av);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
