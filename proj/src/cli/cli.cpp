// SPDX-License-Identifier: Apache-2.0
//
// skyloss - UAV base-station altitude selection from top-down region images
// ------------------------------------------------------------------------

#include "skyloss/cli.hpp"

#include "skyloss/baselines.hpp"
#include "skyloss/config.hpp"
#include "skyloss/coverage.hpp"
#include "skyloss/dataset.hpp"
#include "skyloss/errors.hpp"
#include "skyloss/io.hpp"
#include "skyloss/network.hpp"
#include "skyloss/parallel.hpp"
#include "skyloss/simd/kernels.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>

namespace skyloss::cli {

namespace fs = std::filesystem;

namespace {

struct Common {
    std::string config_path;
    int threads = -1;
    std::string simd = "auto";
};

struct GenArgs {
    std::optional<int> regions;
    std::string altitudes;
    std::optional<std::uint64_t> seed;
    std::optional<int> raster_size;
    std::optional<int> grid_n;
    std::string out;
    bool force = false;
    int verify = 10;
};

struct TrainArgs {
    std::string data;
    std::string out;
    std::string history;
    std::optional<int> epochs;
    std::optional<double> lr;
    std::optional<double> momentum;
    std::optional<int> batch;
    std::optional<std::uint64_t> seed;
};

struct EvalArgs {
    std::string data;
    std::string model;
    bool oracle = false;
    std::string out;
    int fig4_samples = 4;
    std::string hata_env;
};

struct OptimizeArgs {
    std::string data;
    std::optional<int> sample;
    std::string model;
    std::string raster;
    std::string scene;
    std::string altitudes;
    std::string thresholds;
    bool from_truth = false;
    bool from_model = false;
    std::string out;
};

std::vector<double> parse_altitudes(const std::string& text, const char* flag)
{
    auto v = io::parse_number_list(text, flag);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] > 0.0))
            throw ConfigError(std::string(flag) + ": altitudes must be positive");
        if (i > 0 && !(v[i] > v[i - 1]))
            throw ConfigError(std::string(flag) + ": altitudes must be strictly increasing, got '" + text + "'");
    }
    return v;
}

RunConfig load_run_config(const Common& common)
{
    RunConfig rc;
    if (!common.config_path.empty())
        apply_config_file(rc, common.config_path);
    if (common.threads >= 0)
        rc.threads = static_cast<unsigned>(common.threads);
    return rc;
}

void apply_runtime(const Common& common, const RunConfig& rc)
{
    if (rc.threads > 0)
        set_thread_count(rc.threads);
    if (common.simd == "scalar")
        simd::select_isa(simd::Isa::scalar);
    else if (common.simd == "avx2")
        simd::select_isa(simd::Isa::avx2);
}

bool dir_non_empty(const fs::path& p)
{
    return fs::exists(p) && (!fs::is_directory(p) || fs::directory_iterator(p) != fs::directory_iterator());
}

int cmd_gen(const Common& common, const GenArgs& a, std::ostream& out, std::ostream& err)
{
    RunConfig rc = load_run_config(common);
    if (a.regions)
        rc.dataset.n_regions = *a.regions;
    if (!a.altitudes.empty())
        rc.dataset.altitudes = parse_altitudes(a.altitudes, "--altitudes");
    if (a.seed)
        rc.dataset.master_seed = *a.seed;
    if (a.raster_size) {
        rc.dataset.raster_height = *a.raster_size;
        rc.dataset.raster_width = *a.raster_size;
    }
    if (a.grid_n)
        rc.dataset.grid_n = *a.grid_n;
    rc.dataset.validate();
    apply_runtime(common, rc);

    const fs::path dir(a.out);
    if (dir_non_empty(dir)) {
        if (!a.force) {
            err << "error: output directory " << dir << " is not empty (use --force to overwrite)\n";
            return kIo;
        }
        for (const char* item : {"manifest.json", "targets.csv", "targets.bin", "scenes", "rasters"})
            fs::remove_all(dir / item);
    }

    std::mutex log_mutex;
    const auto log = [&](const std::string& msg) {
        std::lock_guard lock(log_mutex);
        err << "[gen] " << msg << '\n';
    };
    log("building " + std::to_string(rc.dataset.n_regions) + " regions into " + dir.string() + " (simd " +
        std::string(simd::isa_name(simd::active_isa())) + ")");
    const DatasetManifest m = build_dataset(rc.dataset, dir, log);
    if (a.verify > 0) {
        const auto bad = verify_dataset(dir, m, a.verify, rc.dataset.master_seed);
        if (!bad.empty()) {
            err << "error: " << bad.size() << " samples failed recomputation\n";
            return kNumeric;
        }
        log("spot-checked " + std::to_string(std::min<int>(a.verify, static_cast<int>(m.samples.size()))) +
            " samples against their scenes");
    }
    out << (dir / "manifest.json").string() << '\n';
    return kOk;
}

int cmd_train(const Common& common, const TrainArgs& a, std::ostream& out, std::ostream& err)
{
    RunConfig rc = load_run_config(common);
    if (a.epochs)
        rc.train.epochs = *a.epochs;
    if (a.lr)
        rc.train.learning_rate = *a.lr;
    if (a.momentum)
        rc.train.momentum = *a.momentum;
    if (a.batch)
        rc.train.batch_size = *a.batch;
    if (a.seed)
        rc.train.seed = *a.seed;
    rc.train.validate();
    apply_runtime(common, rc);

    const fs::path dir(a.data);
    const DatasetManifest m = load_manifest(dir);
    const auto& dc = m.config;
    const nn::ModelSpec spec = rc.model_spec(dc.raster_channels, dc.raster_height, dc.raster_width,
                                             static_cast<int>(dc.altitudes.size()));
    spec.validate();
    const auto train_set = load_samples(dir, m, m.train_ids);
    const auto test_set = load_samples(dir, m, m.test_ids);
    err << "[train] " << train_set.size() << " train / " << test_set.size() << " test samples, "
        << spec.param_count() << " parameters, lr " << rc.train.learning_rate << ", momentum " << rc.train.momentum
        << ", batch " << rc.train.batch_size << ", " << rc.train.epochs << " epochs\n";

    const auto on_epoch = [&](const nn::EpochRecord& r) {
        err << "[train] epoch " << r.epoch << " loss " << io::significant(r.train_loss, 6);
        for (double v : r.test_mse)
            err << ' ' << io::significant(v, 4);
        err << '\n';
    };
    auto result = nn::train(nn::init_params(spec, rc.train.seed), train_set, test_set, rc.train, on_epoch);

    const nn::Checkpoint ckpt{std::move(result.model), rc.train.seed, rc.train.epochs, dc.altitudes};
    nn::save_checkpoint(ckpt, a.out);
    const fs::path history = a.history.empty() ? fs::path(a.out + ".history.csv") : fs::path(a.history);
    io::write_text(history, nn::history_csv(result.history, dc.altitudes));
    out << a.out << '\n';
    return kOk;
}

std::vector<MultiAltitudeTarget> predict_all(const nn::Model& model, const std::vector<nn::Sample>& samples,
                                             std::span<const double> altitudes)
{
    std::vector<MultiAltitudeTarget> out(samples.size());
    parallel_for(samples.size(), [&](std::size_t i) {
        out[i] = MultiAltitudeTarget::unflatten(nn::forward(model, samples[i].input), altitudes);
    });
    return out;
}

int cmd_eval(const Common& common, const EvalArgs& a, std::ostream& out, std::ostream& err)
{
    RunConfig rc = load_run_config(common);
    if (!a.hata_env.empty())
        rc.hata_env = parse_hata_env(a.hata_env);
    apply_runtime(common, rc);
    if (a.model.empty() == !a.oracle)
        throw ConfigError("eval: give exactly one of --model or --oracle");

    const fs::path dir(a.data);
    const DatasetManifest m = load_manifest(dir);
    const auto& alts = m.config.altitudes;
    const auto all_targets = load_targets(dir, m);
    const auto samples = load_samples(dir, m, m.test_ids);
    std::vector<MultiAltitudeTarget> truth;
    for (int id : m.test_ids)
        truth.push_back(all_targets[static_cast<std::size_t>(m.samples[static_cast<std::size_t>(id)].target_row)]);

    std::vector<MultiAltitudeTarget> pred;
    if (a.oracle) {
        pred = truth;
    } else {
        const nn::Checkpoint ckpt = nn::load_checkpoint(a.model);
        if (ckpt.altitudes != alts)
            throw ConsistencyError("eval: model altitudes differ from the dataset's");
        pred = predict_all(ckpt.model, samples, alts);
    }

    const auto mse = mse_per_altitude(truth, pred);
    const auto var = variance_per_altitude(truth);
    const fs::path out_dir(a.out);
    fs::create_directories(out_dir);

    std::ostringstream table;
    table << "altitude_m,mse,test_variance\n";
    for (std::size_t b = 0; b < alts.size(); ++b)
        table << io::shortest(alts[b]) << ',' << io::significant(mse[b], 9) << ',' << io::significant(var[b], 9)
              << '\n';
    io::write_text(out_dir / "table2.csv", table.str());

    std::ostringstream preds, scatter;
    preds << "sample_id";
    for (double h : alts)
        for (int k = 0; k < kBins; ++k)
            preds << ",pred_" << io::shortest(h) << "m_" << io::shortest(bin_center(k));
    preds << '\n';
    scatter << "sample_id,altitude_m,bin_center_db,true,pred\n";
    for (std::size_t s = 0; s < truth.size(); ++s) {
        preds << m.test_ids[s];
        for (double v : pred[s].flatten())
            preds << ',' << io::significant(v, 9);
        preds << '\n';
        for (std::size_t b = 0; b < alts.size(); ++b)
            for (int k = 0; k < kBins; ++k)
                scatter << m.test_ids[s] << ',' << io::shortest(alts[b]) << ',' << io::shortest(bin_center(k)) << ','
                        << io::significant(truth[s].blocks[b].bins[k], 9) << ','
                        << io::significant(pred[s].blocks[b].bins[k], 9) << '\n';
    }
    io::write_text(out_dir / "predictions.csv", preds.str());
    io::write_text(out_dir / "scatter.csv", scatter.str());

    // Per-sample comparison against the analytic baselines.
    const int n_fig4 = std::min<int>(a.fig4_samples, static_cast<int>(truth.size()));
    if (n_fig4 > 0)
        fs::create_directories(out_dir / "fig4");
    for (int s = 0; s < n_fig4; ++s) {
        const int id = m.test_ids[static_cast<std::size_t>(s)];
        const Scene scene = load_scene(dir / m.samples[static_cast<std::size_t>(id)].scene_file);
        const ReceiverGrid grid = receiver_grid(scene, m.config.grid_n, m.config.rx_height);
        for (std::size_t b = 0; b < alts.size(); ++b) {
            TxConfig tx = m.config.tx;
            tx.altitude = alts[b];
            const auto fs_dist = baseline_distribution(grid, tx, {BaselineKind::free_space, rc.hata_env});
            const auto hata_dist = baseline_distribution(grid, tx, {BaselineKind::okumura_hata, rc.hata_env});
            std::ostringstream f;
            f << "bin_center_db,true,predicted,free_space,hata\n";
            for (int k = 0; k < kBins; ++k)
                f << io::shortest(bin_center(k)) << ',' << io::significant(truth[s].blocks[b].bins[k], 9) << ','
                  << io::significant(pred[s].blocks[b].bins[k], 9) << ',' << io::significant(fs_dist.bins[k], 9)
                  << ',' << io::significant(hata_dist.bins[k], 9) << '\n';
            char name[64];
            std::snprintf(name, sizeof name, "sample_%04d_%sm.csv", id, io::shortest(alts[b]).c_str());
            io::write_text(out_dir / "fig4" / name, f.str());
        }
    }

    err << "[eval] altitude  mse        test_variance\n";
    for (std::size_t b = 0; b < alts.size(); ++b)
        err << "[eval] " << io::shortest(alts[b]) << "  " << io::significant(mse[b], 4) << "  "
            << io::significant(var[b], 4) << '\n';
    out << (out_dir / "table2.csv").string() << '\n';
    return kOk;
}

int cmd_optimize(const Common& common, const OptimizeArgs& a, std::ostream& out, std::ostream& err)
{
    RunConfig rc = load_run_config(common);
    apply_runtime(common, rc);
    const std::vector<double> thresholds =
        a.thresholds.empty() ? rc.thresholds : io::parse_number_list(a.thresholds, "--thresholds");
    if (thresholds.empty())
        throw ConfigError("--thresholds: at least one threshold is required");

    bool want_truth = a.from_truth;
    bool want_model = a.from_model;
    if (!want_truth && !want_model) {
        want_model = !a.model.empty();
        want_truth = !want_model || a.sample.has_value() || !a.scene.empty();
    }

    std::optional<DatasetManifest> manifest;
    if (!a.data.empty())
        manifest = load_manifest(a.data);
    if (a.sample && !manifest)
        throw ConfigError("--sample requires --data");
    const SampleEntry* entry = nullptr;
    if (a.sample) {
        const auto it = std::find_if(manifest->samples.begin(), manifest->samples.end(),
                                     [&](const SampleEntry& e) { return e.id == *a.sample; });
        if (it == manifest->samples.end())
            throw ConfigError("--sample: no sample with id " + std::to_string(*a.sample));
        entry = &*it;
    }

    std::optional<MultiAltitudeTarget> truth, pred;
    if (want_truth) {
        if (!a.scene.empty()) {
            const DatasetConfig& dc = manifest ? manifest->config : rc.dataset;
            const std::vector<double> alts =
                a.altitudes.empty() ? dc.altitudes : parse_altitudes(a.altitudes, "--altitudes");
            const Scene scene = load_scene(a.scene);
            const ReceiverGrid grid = receiver_grid(scene, dc.grid_n, dc.rx_height);
            truth = concat_target(batch_simulate(scene, grid, alts, dc.tx, dc.nlos));
        } else if (entry) {
            truth = load_targets(a.data, *manifest)[static_cast<std::size_t>(entry->target_row)];
        } else {
            throw ConfigError("--from-truth needs --scene or --data with --sample");
        }
    }
    if (want_model) {
        if (a.model.empty())
            throw ConfigError("--from-model needs --model");
        const nn::Checkpoint ckpt = nn::load_checkpoint(a.model);
        RasterImage image;
        if (!a.raster.empty())
            image = load_raster(a.raster);
        else if (entry)
            image = load_raster(fs::path(a.data) / entry->raster_file);
        else
            throw ConfigError("--from-model needs --raster or --data with --sample");
        pred = MultiAltitudeTarget::unflatten(nn::forward(ckpt.model, image), ckpt.altitudes);
    }
    if (truth && pred && truth->altitudes != pred->altitudes)
        throw ConsistencyError("true and predicted altitude sets differ");

    std::optional<CoverageTable> t_table, p_table;
    if (truth)
        t_table = coverage_table(*truth, thresholds);
    if (pred)
        p_table = coverage_table(*pred, thresholds);
    const std::string csv = coverage_report_csv(t_table ? &*t_table : nullptr, p_table ? &*p_table : nullptr);
    if (!a.out.empty())
        io::write_text(a.out, csv);

    const CoverageTable& chosen = p_table ? *p_table : *t_table;
    for (std::size_t j = 0; j < thresholds.size(); ++j) {
        const std::size_t b = chosen.argmax[j];
        out << io::shortest(chosen.altitudes[b]) << '\n';
        err << "[optimize] threshold " << io::shortest(thresholds[j]) << " dB -> altitude "
            << io::shortest(chosen.altitudes[b]) << " m, coverage " << io::significant(chosen.coverage[b][j], 4);
        if (t_table && p_table)
            err << (t_table->argmax[j] == b ? " (matches truth)" : " (truth prefers " +
                                                                      io::shortest(t_table->altitudes[t_table->argmax[j]]) +
                                                                      " m)");
        err << '\n';
    }
    return kOk;
}

void add_common(CLI::App* app, Common& c)
{
    app->add_option("--config", c.config_path, "JSON config file with flat dotted keys")->check(CLI::ExistingFile);
    app->add_option("--threads", c.threads, "Worker thread cap (default: SKYLOSS_THREADS or all cores)")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--simd", c.simd, "Kernel variant: auto, scalar or avx2")
        ->check(CLI::IsMember({"auto", "scalar", "avx2"}));
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"skyloss: path-loss distributions from top-down region images and UAV altitude selection"};
    app.require_subcommand(1);
    Common common;

    GenArgs gen;
    auto* g = app.add_subcommand("gen", "Generate a synthetic dataset (scenes, rasters, multi-altitude targets)");
    add_common(g, common);
    g->add_option("--regions", gen.regions, "Number of regions");
    g->add_option("--altitudes", gen.altitudes, "Comma-separated, strictly increasing transmitter altitudes in m");
    g->add_option("--seed", gen.seed, "Master seed");
    g->add_option("--raster-size", gen.raster_size, "Square raster side in pixels");
    g->add_option("--grid-n", gen.grid_n, "Receivers per grid side");
    g->add_option("--out", gen.out, "Output directory")->required();
    g->add_flag("--force", gen.force, "Overwrite an existing dataset in --out");
    g->add_option("--verify", gen.verify, "Samples to recompute from their scenes after the build (0 disables)");

    TrainArgs tr;
    auto* t = app.add_subcommand("train", "Train the network on a generated dataset");
    add_common(t, common);
    t->add_option("--data", tr.data, "Dataset directory")->required();
    t->add_option("--out", tr.out, "Checkpoint path")->required();
    t->add_option("--history", tr.history, "History CSV path (default: <out>.history.csv)");
    t->add_option("--epochs", tr.epochs, "Epochs");
    t->add_option("--lr", tr.lr, "Learning rate");
    t->add_option("--momentum", tr.momentum, "Momentum");
    t->add_option("--batch", tr.batch, "Batch size");
    t->add_option("--seed", tr.seed, "Initialization and shuffling seed");

    EvalArgs ev;
    auto* e = app.add_subcommand("eval", "Per-altitude MSE vs test-set variance, predictions and baseline reports");
    add_common(e, common);
    e->add_option("--data", ev.data, "Dataset directory")->required();
    e->add_option("--model", ev.model, "Checkpoint path");
    e->add_flag("--oracle", ev.oracle, "Use the true distributions as predictions");
    e->add_option("--out", ev.out, "Output directory")->required();
    e->add_option("--fig4-samples", ev.fig4_samples, "Test samples with baseline comparison CSVs");
    e->add_option("--hata-env", ev.hata_env, "Hata environment: urban-small, urban-large, suburban, open");

    OptimizeArgs op;
    auto* o = app.add_subcommand("optimize", "Coverage table and coverage-maximizing altitude per threshold");
    add_common(o, common);
    o->add_option("--data", op.data, "Dataset directory");
    o->add_option("--sample", op.sample, "Sample id within --data");
    o->add_option("--model", op.model, "Checkpoint path");
    o->add_option("--raster", op.raster, "Raster file (.plras) to run the model on");
    o->add_option("--scene", op.scene, "Scene JSON to simulate true distributions from");
    o->add_option("--altitudes", op.altitudes, "Altitudes for --scene (default: config/dataset set)");
    o->add_option("--thresholds", op.thresholds, "Comma-separated path-loss thresholds in dB (default 116,119,122,125,128)");
    o->add_flag("--from-truth", op.from_truth, "Compute coverage from true distributions");
    o->add_flag("--from-model", op.from_model, "Compute coverage from model predictions");
    o->add_option("--out", op.out, "Coverage report CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& ex) {
        app.exit(ex, out, err);
        return kOk;
    } catch (const CLI::CallForAllHelp& ex) {
        app.exit(ex, out, err);
        return kOk;
    } catch (const CLI::ParseError& ex) {
        app.exit(ex, out, err);
        return kUsage;
    }

    try {
        if (g->parsed())
            return cmd_gen(common, gen, out, err);
        if (t->parsed())
            return cmd_train(common, tr, out, err);
        if (e->parsed())
            return cmd_eval(common, ev, out, err);
        if (o->parsed())
            return cmd_optimize(common, op, out, err);
    } catch (const ConfigError& ex) {
        err << "error: " << ex.what() << '\n';
        return kUsage;
    } catch (const IoError& ex) {
        err << "error: " << ex.what() << '\n';
        return kIo;
    } catch (const fs::filesystem_error& ex) {
        err << "error: " << ex.what() << '\n';
        return kIo;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << '\n';
        return kNumeric;
    }
    return kUsage;
}

} // namespace skyloss::cli
