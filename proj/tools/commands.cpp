#include "commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <stdexcept>

#include "CLI11.hpp"
#include "llpauc/bounds.hpp"
#include "llpauc/data.hpp"
#include "llpauc/gradcheck.hpp"
#include "llpauc/io.hpp"
#include "llpauc/model.hpp"
#include "llpauc/trainer.hpp"

namespace llpauc::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum class LogLevel { error, warn, info, debug };

struct Globals {
    std::uint64_t seed = 0;
    std::string output_dir;
    std::string log_level = "info";

    LogLevel level() const {
        if (log_level == "error") return LogLevel::error;
        if (log_level == "warn") return LogLevel::warn;
        if (log_level == "debug") return LogLevel::debug;
        return LogLevel::info;
    }
};

class Context {
public:
    Context(const Globals& g, std::ostream& out, std::ostream& err) : g_(g), out_(out), err_(err) {}

    std::ostream& info() { return g_.level() >= LogLevel::info ? out_ : null_; }
    std::ostream& warn() { return g_.level() >= LogLevel::warn ? err_ : null_; }

    fs::path output_dir() const {
        std::string dir = g_.output_dir;
        if (dir.empty())
            if (const char* env = std::getenv(kOutputDirEnv)) dir = env;
        if (dir.empty()) dir = "llpauc_out";
        fs::create_directories(dir);
        return dir;
    }

    std::uint64_t seed() const { return g_.seed; }
    const Globals& globals() const { return g_; }

private:
    struct NullBuf : std::streambuf {
        int overflow(int c) override { return c; }
    };
    const Globals& g_;
    std::ostream& out_;
    std::ostream& err_;
    NullBuf nullbuf_;
    std::ostream null_{&nullbuf_};
};

json manifest_base(const std::string& command, const Context& ctx) {
    return {{"tool", "llpauc"},
            {"command", command},
            {"seed", ctx.seed()},
            {"log_level", ctx.globals().log_level}};
}

std::string path_str(const fs::path& p) { return p.string(); }

// ---- simulate ------------------------------------------------------------

struct SimulateArgs {
    CorrelationConfig cfg;
    bool serial = false;
};

int cmd_simulate(SimulateArgs a, Context& ctx) {
    a.cfg.seed = ctx.seed();
    a.cfg.resolve();
    const auto grid = simulate_correlation(a.cfg, a.serial ? Exec::serial : Exec::parallel);
    const auto dir = ctx.output_dir();

    json summary;
    if (const auto best = grid.argmax()) {
        summary["argmax"] = {{"alpha", grid.alphas[best->first]},
                             {"beta", grid.betas[best->second]},
                             {"pearson", *grid.at(best->first, best->second)}};
    } else {
        summary["argmax"] = nullptr;
    }
    const auto ia1 = std::find(grid.alphas.begin(), grid.alphas.end(), 1.0);
    const auto ib1 = std::find(grid.betas.begin(), grid.betas.end(), 1.0);
    summary["auc_cell"] = nullptr;
    summary["opauc_best"] = nullptr;
    if (ia1 != grid.alphas.end()) {
        const auto ia = static_cast<std::size_t>(ia1 - grid.alphas.begin());
        if (ib1 != grid.betas.end()) {
            const auto& c = grid.at(ia, static_cast<std::size_t>(ib1 - grid.betas.begin()));
            summary["auc_cell"] = {{"alpha", 1.0}, {"beta", 1.0}, {"pearson", c ? json(*c) : json(nullptr)}};
        }
        std::optional<std::size_t> best_b;
        for (std::size_t ib = 0; ib < grid.betas.size(); ++ib) {
            const auto& c = grid.at(ia, ib);
            if (c && (!best_b || *c > *grid.at(ia, *best_b))) best_b = ib;
        }
        if (best_b)
            summary["opauc_best"] = {{"alpha", 1.0}, {"beta", grid.betas[*best_b]}, {"pearson", *grid.at(ia, *best_b)}};
    }
    if (summary["argmax"].is_object()) {
        // Comparison cell (1, beta*) sharing the argmax beta.
        const double bstar = summary["argmax"]["beta"];
        const auto ib = static_cast<std::size_t>(std::find(grid.betas.begin(), grid.betas.end(), bstar) -
                                                 grid.betas.begin());
        if (ia1 != grid.alphas.end()) {
            const auto& c = grid.at(static_cast<std::size_t>(ia1 - grid.alphas.begin()), ib);
            summary["opauc_at_argmax_beta"] = {{"alpha", 1.0}, {"beta", bstar}, {"pearson", c ? json(*c) : json(nullptr)}};
        }
    }

    write_text(path_str(dir / "correlation.csv"), grid_csv(grid));
    write_json(path_str(dir / "correlation.json"), to_json(grid));
    write_json(path_str(dir / "summary.json"), summary);
    auto m = manifest_base("simulate", ctx);
    m["config"] = to_json(a.cfg);
    m["exec"] = a.serial ? "serial" : "parallel";
    write_json(path_str(dir / "manifest.json"), m);

    ctx.info() << "argmax " << summary["argmax"].dump() << '\n';
    ctx.info() << "auc cell " << summary["auc_cell"].dump() << '\n';
    ctx.info() << "opauc best " << summary["opauc_best"].dump() << '\n';
    return kOk;
}

// ---- verify-bounds -------------------------------------------------------

struct VerifyArgs {
    std::size_t n_pos = 0, n_neg = 0, k = 0;
    bool corrupt_g = false;
};

double corrupted_g_lower(double v, std::size_t k, std::size_t n_pos, std::size_t n_neg) {
    return g_lower(v, k, n_pos, n_neg) + 1.0;
}

int cmd_verify_bounds(const VerifyArgs& a, Context& ctx) {
    BoundFunctions fns;
    if (a.corrupt_g) fns.lower_llpauc = &corrupted_g_lower;
    const auto rep = verify_bounds_exhaustive(a.n_pos, a.n_neg, a.k, fns);
    const auto dir = ctx.output_dir();
    write_json(path_str(dir / "verify_bounds.json"), to_json(rep));
    auto m = manifest_base("verify-bounds", ctx);
    m["config"] = {{"n_pos", a.n_pos}, {"n_neg", a.n_neg}, {"k", a.k}, {"corrupt_g", a.corrupt_g}};
    write_json(path_str(dir / "manifest.json"), m);
    ctx.info() << rep.arrangements << " arrangements, " << rep.total_violations() << " violations\n";
    if (!rep.ok()) {
        ctx.warn() << "bound violation, first offending ranking " << rep.first_violation.value_or("?") << '\n';
        return kCheckFailed;
    }
    return kOk;
}

// ---- train ---------------------------------------------------------------

struct TrainArgs {
    std::string data;
    std::string config;  // earlier train manifest to start from
    SynthSpec synth;
    SplitSpec split;
    std::string noise_mode = "clean";
    std::optional<double> noise_cap;
    TrainConfig train;
    std::string loss = "llpauc";
    std::string optimizer = "sgda";
    std::string select = "recall";
    bool serial = false;
    std::vector<std::size_t> test_ks;

    // Options that were set explicitly, replayed on top of --config.
    std::vector<std::pair<CLI::Option*, std::function<void(TrainArgs&, const TrainArgs&)>>> overrides;
};

void resolve_enums(TrainArgs& a) {
    a.train.loss_kind = parse_loss_kind(a.loss);
    a.train.optimizer = parse_optimizer(a.optimizer);
    a.train.select_metric = parse_select_metric(a.select);
    a.train.exec = a.serial ? Exec::serial : Exec::parallel;
    if (a.noise_mode == "clean")
        a.split.noise_mode = NoiseMode::clean;
    else if (a.noise_mode == "noise")
        a.split.noise_mode = NoiseMode::noise;
    else
        throw std::invalid_argument("noise mode must be clean or noise");
    a.split.noise_cap = a.noise_cap;
}

void apply_manifest(TrainArgs& a, const json& m) {
    const TrainArgs flags = a;
    if (m.value("command", std::string()) != "train") throw std::invalid_argument("--config must be a train manifest");
    a.train = train_config_from_json(m.at("train_config"));
    a.loss = to_string(a.train.loss_kind);
    a.optimizer = to_string(a.train.optimizer);
    a.select = to_string(a.train.select_metric);
    a.serial = a.train.exec == Exec::serial;
    const auto& src = m.at("data_source");
    if (src.at("kind") == "file") {
        a.data = src.at("path");
    } else {
        a.data.clear();
        const auto& s = src.at("synth");
        a.synth.n_users = s.at("n_users");
        a.synth.n_items = s.at("n_items");
        a.synth.d_true = s.at("d_true");
        a.synth.density = s.at("density");
        a.synth.noise_flip_rate = s.at("noise_flip_rate");
        a.synth.seed = s.at("seed");
    }
    const auto& sp = m.at("split_spec");
    a.split.train_frac = sp.at("train_frac");
    a.split.val_frac = sp.at("val_frac");
    a.split.test_frac = sp.at("test_frac");
    a.split.min_user_interactions = sp.at("min_user_interactions");
    a.split.seed = sp.at("seed");
    a.noise_mode = sp.at("noise_mode");
    a.split.noise_rating_threshold = sp.at("noise_rating_threshold");
    a.noise_cap = sp.at("noise_cap").is_null() ? std::nullopt : std::optional<double>(sp.at("noise_cap"));
    a.test_ks = m.at("test_ks").get<std::vector<std::size_t>>();
    for (const auto& [opt, assign] : flags.overrides)
        if (opt->count() > 0) assign(a, flags);
}

int cmd_train(TrainArgs a, Context& ctx) {
    if (!a.config.empty()) apply_manifest(a, read_json(a.config));
    resolve_enums(a);
    if (a.test_ks.empty()) a.test_ks = {a.train.eval_k};
    a.train.validate();
    a.split.validate();

    InteractionTable table;
    json source;
    if (!a.data.empty()) {
        table = load_interactions(a.data, format_for_path(a.data));
        source = {{"kind", "file"}, {"path", fs::absolute(a.data).string()}};
    } else {
        const auto syn = synth_generate(a.synth);
        table = syn.table;
        source = {{"kind", "synthetic"}, {"synth", to_json(a.synth)}, {"n_clean", syn.n_clean}, {"n_noisy", syn.n_noisy}};
    }
    if (a.split.noise_mode == NoiseMode::noise && !table.has_rating())
        throw std::invalid_argument("noise mode needs ratings to identify noisy records");

    const auto split = make_split(table, a.split);
    const auto dir = ctx.output_dir();
    write_split(split, a.split, path_str(dir / "split"));
    const auto data = TrainData::from_split(split);

    ctx.info() << "users " << data.n_users << " items " << data.n_items << " train " << data.train_pairs.size()
               << " loss " << to_string(a.train.loss_kind) << '\n';
    auto res = train(data, a.train, [&](const EpochRecord& r) {
        ctx.info() << "epoch " << r.epoch << " objective " << r.objective << " val_recall " << r.val_recall
                   << " val_ndcg " << r.val_ndcg << '\n';
    });

    save_model(res.model, path_str(dir / "model.bin"));
    write_json(path_str(dir / "dual.json"), to_json(res.dual));
    write_text(path_str(dir / "history.csv"), history_csv(res.history));
    write_json(path_str(dir / "history.json"), to_json(res.history));
    const auto test = evaluate_test(res.model, data, a.test_ks, a.train.exec);
    write_json(path_str(dir / "test_eval.json"), to_json(test));

    auto m = manifest_base("train", ctx);
    m["data_source"] = source;
    m["split_spec"] = to_json(a.split);
    m["train_config"] = to_json(a.train);
    m["test_ks"] = a.test_ks;
    m["outputs"] = {"split/", "model.bin", "dual.json", "history.csv", "history.json", "test_eval.json"};
    m["result"] = {{"best_epoch", res.history.best_epoch},
                   {"epochs_run", res.history.epochs.size()},
                   {"stopped_early", res.history.stopped_early}};
    write_json(path_str(dir / "manifest.json"), m);

    ctx.info() << "best epoch " << res.history.best_epoch << "; test";
    for (const auto& r : test.per_k) ctx.info() << " recall@" << r.k << ' ' << r.recall << " ndcg@" << r.k << ' ' << r.ndcg;
    ctx.info() << '\n';
    return kOk;
}

// ---- evaluate ------------------------------------------------------------

struct EvaluateArgs {
    std::string checkpoint;
    std::string split_dir;
    std::vector<std::size_t> ks = {20};
    std::string set = "test";
    bool serial = false;
};

int cmd_evaluate(const EvaluateArgs& a, Context& ctx) {
    const auto model = load_model(a.checkpoint);
    const auto split = read_split(a.split_dir);
    const auto data = TrainData::from_split(split);
    if (model.n_users != data.n_users || model.n_items != data.n_items)
        throw std::runtime_error("checkpoint shape does not match the split's id maps");
    const Exec exec = a.serial ? Exec::serial : Exec::parallel;
    const auto rep = a.set == "val" ? evaluate_validation(model, data, a.ks, exec) : evaluate_test(model, data, a.ks, exec);
    const auto dir = ctx.output_dir();
    write_json(path_str(dir / "eval.json"), to_json(rep));
    auto m = manifest_base("evaluate", ctx);
    m["config"] = {{"checkpoint", fs::absolute(a.checkpoint).string()},
                   {"split_dir", fs::absolute(a.split_dir).string()},
                   {"ks", a.ks},
                   {"set", a.set},
                   {"exec", a.serial ? "serial" : "parallel"}};
    write_json(path_str(dir / "manifest.json"), m);
    for (const auto& r : rep.per_k)
        ctx.info() << "K=" << r.k << " recall " << r.recall << " precision " << r.precision << " ndcg " << r.ndcg
                   << '\n';
    ctx.info() << rep.users_evaluated << " users evaluated, " << rep.users_skipped << " skipped\n";
    return kOk;
}

// ---- gradcheck -----------------------------------------------------------

int cmd_gradcheck(GradcheckConfig cfg, Context& ctx) {
    cfg.seed = ctx.seed();
    const auto rep = run_gradcheck(cfg);
    const auto dir = ctx.output_dir();
    write_json(path_str(dir / "gradcheck.json"), to_json(rep));
    auto m = manifest_base("gradcheck", ctx);
    m["config"] = to_json(cfg);
    write_json(path_str(dir / "manifest.json"), m);
    ctx.info() << rep.checks << " objective partials (" << rep.failures << " failed), " << rep.embedding_checks
               << " embedding partials (" << rep.embedding_failures << " failed), max rel error "
               << rep.max_rel_error << '\n';
    if (!rep.ok()) {
        ctx.warn() << "gradient mismatch; worst: " << rep.worst << '\n';
        return kCheckFailed;
    }
    return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Lower-left partial AUC toolkit: metrics, bound checks, training and evaluation", "llpauc"};
    app.require_subcommand(1);
    Globals g;
    auto* seed_opt = app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
    app.add_option("--output-dir", g.output_dir,
                   std::string("Directory for outputs (default: $") + kOutputDirEnv + " or ./llpauc_out)");
    app.add_option("--log-level", g.log_level, "error, warn, info or debug")
        ->capture_default_str()
        ->check(CLI::IsMember({"error", "warn", "info", "debug"}));

    // simulate
    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo correlation between LLPAUC and Recall@K");
    simulate->add_option("--n-pos", sim.cfg.n_pos, "Positives per ranking")->capture_default_str();
    simulate->add_option("--n-neg", sim.cfg.n_neg, "Negatives per ranking")->capture_default_str();
    simulate->add_option("--n-samples", sim.cfg.n_samples, "Random rankings")->capture_default_str();
    simulate->add_option("--k", sim.cfg.k, "Top-K cutoff for recall")->capture_default_str();
    simulate->add_option("--alphas", sim.cfg.alphas, "TPR grid (default: log-spaced from 1/n_pos to 1)");
    simulate->add_option("--betas", sim.cfg.betas, "FPR grid (default: log-spaced from 1/n_neg to 1)");
    simulate->add_flag("--serial", sim.serial, "Use the serial reference path");

    // verify-bounds
    VerifyArgs ver;
    auto* verify = app.add_subcommand("verify-bounds", "Exhaustively check the Top-K bounds on small rankings");
    verify->add_option("--n-pos", ver.n_pos, "Positives")->required();
    verify->add_option("--n-neg", ver.n_neg, "Negatives")->required();
    verify->add_option("--k", ver.k, "Top-K cutoff")->required();
    verify->add_flag("--corrupt-g", ver.corrupt_g, "Shift the lower bound upward (negative control)")->group("");

    // train
    TrainArgs tr;
    auto* trainc = app.add_subcommand("train", "Train a matrix factorization model");
    auto ov = [&](CLI::Option* o, std::function<void(TrainArgs&, const TrainArgs&)> f) {
        tr.overrides.emplace_back(o, std::move(f));
        return o;
    };
#define LLPAUC_FIELD(expr) [](TrainArgs& dst, const TrainArgs& src) { dst.expr = src.expr; }
    ov(trainc->add_option("--data", tr.data, "Interaction file (TSV/CSV with header); synthetic data when omitted"),
       LLPAUC_FIELD(data));
    trainc->add_option("--config", tr.config, "Start from an earlier train manifest; explicit flags override it")
        ->check(CLI::ExistingFile);
    ov(trainc->add_option("--synth-users", tr.synth.n_users)->capture_default_str(), LLPAUC_FIELD(synth.n_users));
    ov(trainc->add_option("--synth-items", tr.synth.n_items)->capture_default_str(), LLPAUC_FIELD(synth.n_items));
    ov(trainc->add_option("--synth-dim", tr.synth.d_true, "Latent dimension of the generator")->capture_default_str(),
       LLPAUC_FIELD(synth.d_true));
    ov(trainc->add_option("--synth-density", tr.synth.density)->capture_default_str(), LLPAUC_FIELD(synth.density));
    ov(trainc->add_option("--synth-noise", tr.synth.noise_flip_rate, "Fraction of positives that are flipped noise")
           ->capture_default_str(),
       LLPAUC_FIELD(synth.noise_flip_rate));
    auto* synth_seed = ov(trainc->add_option("--synth-seed", tr.synth.seed, "Generator seed (default: --seed)"),
                          LLPAUC_FIELD(synth.seed));
    ov(trainc->add_option("--train-frac", tr.split.train_frac)->capture_default_str(), LLPAUC_FIELD(split.train_frac));
    ov(trainc->add_option("--val-frac", tr.split.val_frac)->capture_default_str(), LLPAUC_FIELD(split.val_frac));
    ov(trainc->add_option("--test-frac", tr.split.test_frac)->capture_default_str(), LLPAUC_FIELD(split.test_frac));
    ov(trainc->add_option("--min-user-interactions", tr.split.min_user_interactions)->capture_default_str(),
       LLPAUC_FIELD(split.min_user_interactions));
    auto* split_seed = ov(trainc->add_option("--split-seed", tr.split.seed, "Split seed (default: --seed)"),
                          LLPAUC_FIELD(split.seed));
    ov(trainc->add_option("--noise-mode", tr.noise_mode, "clean or noise")
           ->capture_default_str()
           ->check(CLI::IsMember({"clean", "noise"})),
       LLPAUC_FIELD(noise_mode));
    ov(trainc->add_option("--noise-threshold", tr.split.noise_rating_threshold, "Ratings below this are noise")
           ->capture_default_str(),
       LLPAUC_FIELD(split.noise_rating_threshold));
    ov(trainc->add_option("--noise-cap", tr.noise_cap, "Cap on noisy records per user, relative to clean count"),
       LLPAUC_FIELD(noise_cap));
    ov(trainc->add_option("--loss", tr.loss, "llpauc, auc-ablation, opauc-ablation, bpr or bce")
           ->capture_default_str()
           ->check(CLI::IsMember({"llpauc", "auc-ablation", "opauc-ablation", "bpr", "bce"})),
       LLPAUC_FIELD(loss));
    ov(trainc->add_option("--alpha", tr.train.alpha)->capture_default_str(), LLPAUC_FIELD(train.alpha));
    ov(trainc->add_option("--beta", tr.train.beta)->capture_default_str(), LLPAUC_FIELD(train.beta));
    ov(trainc->add_option("--kappa", tr.train.kappa)->capture_default_str(), LLPAUC_FIELD(train.kappa));
    ov(trainc->add_option("--w", tr.train.w, "Gamma regularizer weight, must exceed 4*kappa")->capture_default_str(),
       LLPAUC_FIELD(train.w));
    ov(trainc->add_option("--lr", tr.train.lr)->capture_default_str(), LLPAUC_FIELD(train.lr));
    ov(trainc->add_option("--batch-size", tr.train.batch_size)->capture_default_str(), LLPAUC_FIELD(train.batch_size));
    ov(trainc->add_option("--neg-per-pos", tr.train.neg_per_pos)->capture_default_str(),
       LLPAUC_FIELD(train.neg_per_pos));
    ov(trainc->add_option("--epochs", tr.train.epochs)->capture_default_str(), LLPAUC_FIELD(train.epochs));
    ov(trainc->add_option("--eval-k", tr.train.eval_k)->capture_default_str(), LLPAUC_FIELD(train.eval_k));
    ov(trainc->add_option("--select-metric", tr.select)->capture_default_str()->check(CLI::IsMember({"recall", "ndcg"})),
       LLPAUC_FIELD(select));
    ov(trainc->add_option("--optimizer", tr.optimizer)->capture_default_str()->check(CLI::IsMember({"sgda", "adam"})),
       LLPAUC_FIELD(optimizer));
    ov(trainc->add_option("--dim", tr.train.dim)->capture_default_str(), LLPAUC_FIELD(train.dim));
    ov(trainc->add_option("--init-sigma", tr.train.init_sigma)->capture_default_str(), LLPAUC_FIELD(train.init_sigma));
    ov(trainc->add_option("--patience", tr.train.patience, "0 disables early stopping")->capture_default_str(),
       LLPAUC_FIELD(train.patience));
    ov(trainc->add_option("--test-k", tr.test_ks, "K values for the final test report (default: eval-k)"),
       LLPAUC_FIELD(test_ks));
    ov(trainc->add_flag("--serial", tr.serial, "Use the serial reference path"), LLPAUC_FIELD(serial));
#undef LLPAUC_FIELD

    // evaluate
    EvaluateArgs ev;
    auto* evaluate = app.add_subcommand("evaluate", "Full-ranking Top-K evaluation of a checkpoint");
    evaluate->add_option("--checkpoint", ev.checkpoint, "Model checkpoint")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--split-dir", ev.split_dir, "Split directory written by train")
        ->required()
        ->check(CLI::ExistingDirectory);
    evaluate->add_option("--k", ev.ks, "K values")->capture_default_str();
    evaluate->add_option("--set", ev.set, "test or val")->capture_default_str()->check(CLI::IsMember({"test", "val"}));
    evaluate->add_flag("--serial", ev.serial, "Use the serial reference path");

    // gradcheck
    GradcheckConfig gc;
    auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of the analytic gradients");
    gradcheck->add_option("--n-points", gc.n_points, "Random points per kappa")->capture_default_str();
    gradcheck->add_option("--kappas", gc.kappas)->capture_default_str();
    gradcheck->add_option("--step", gc.step, "Central difference step")->capture_default_str();

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    Context ctx(g, out, err);
    try {
        if (*simulate) return cmd_simulate(sim, ctx);
        if (*verify) return cmd_verify_bounds(ver, ctx);
        if (*trainc) {
            if (synth_seed->count() == 0 && tr.config.empty()) tr.synth.seed = g.seed;
            if (split_seed->count() == 0 && tr.config.empty()) tr.split.seed = g.seed;
            if (seed_opt->count() > 0 || tr.config.empty()) tr.train.seed = g.seed;
            if (seed_opt->count() > 0)
                tr.overrides.emplace_back(seed_opt, [](TrainArgs& dst, const TrainArgs& src) {
                    dst.train.seed = src.train.seed;
                });
            return cmd_train(tr, ctx);
        }
        if (*evaluate) return cmd_evaluate(ev, ctx);
        if (*gradcheck) return cmd_gradcheck(gc, ctx);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::length_error& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kUsage;
}

}  // namespace llpauc::cli
