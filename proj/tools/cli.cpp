#include "cli.hpp"

#include "pyratext/checkpoint.hpp"
#include "pyratext/errors.hpp"
#include "pyratext/gradcheck.hpp"
#include "pyratext/metrics.hpp"
#include "pyratext/sweep.hpp"
#include "pyratext/tensor_io.hpp"
#include "pyratext/train.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace pyratext::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !out.write(text.data(), static_cast<std::streamsize>(text.size())))
        throw DataError("cannot write " + path.string());
}

void require_file(const std::string& path, const char* what) {
    if (path.empty()) throw ConfigError(std::string("missing path for ") + what);
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) throw DataError(std::string(what) + " not found: " + path);
}

void prepare_out_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw DataError("cannot create output directory: " + dir);
}

DataSpec parse_data(const json& j) {
    DataSpec d;
    StrictObject o(j, "data");
    std::string kind = "synthetic";
    o.get("kind", kind);
    if (kind == "synthetic") {
        auto& s = d.synthetic;
        o.get("seed", s.seed);
        o.get("n_per_class", s.n_per_class);
        o.get("eval_per_class", d.eval_per_class);
        o.get("num_classes", s.num_classes);
        o.get("vocab_size", s.vocab_size);
        o.get("signal_tokens_per_class", s.signal_tokens_per_class);
        o.get("noise", s.noise);
        o.get("min_len", s.min_len);
        o.get("max_len", s.max_len);
    } else if (kind == "agnews") {
        d.kind = DataKind::agnews;
        auto& a = d.agnews;
        o.get("train", a.train_path);
        o.get("test", a.test_path);
        o.get("per_class", a.per_class);
        o.get("eval_per_class", a.eval_per_class);
        o.get("vocab_size", a.vocab_size);
        o.get("min_freq", a.min_freq);
    } else {
        throw ConfigError("data.kind must be 'synthetic' or 'agnews', got '" + kind + "'");
    }
    o.finish();
    return d;
}

void apply_seed_override(TrainConfig& cfg) {
    const char* env = std::getenv("PYRATEXT_SEED");
    if (!env) return;
    const std::string text = env;
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (text.empty() || used != text.size() || text[0] == '-')
        throw ConfigError("PYRATEXT_SEED must be an unsigned integer, got '" + text + "'");
    cfg.seed = v;
}

// Checks everything that does not need the data: ranges of the training
// fields and, for files, that they exist.
void check_before_work(const RunConfig& rc) {
    TrainConfig probe = rc.train;
    probe.model.encoder.vocab_size = std::max<std::size_t>(probe.model.encoder.vocab_size, 2);
    probe.validate();
    if (rc.data.kind == DataKind::agnews) {
        require_file(rc.data.agnews.train_path, "data.train");
        require_file(rc.data.agnews.test_path, "data.test");
    }
}

std::vector<double> parse_rates(const std::string& text) {
    std::vector<double> rates;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) throw ConfigError("bad learning rate '" + item + "' in --rates");
        rates.push_back(v);
    }
    if (rates.size() < 2) throw ConfigError("--rates needs at least 2 learning rates");
    return rates;
}

std::string timestamp() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", std::localtime(&now));
    return buf;
}

// Eval data for a checkpoint: a token dump (.jsonl, hash-checked) or an AG
// News CSV encoded with the checkpoint's own vocabulary.
DatasetSplit load_eval_split(const std::string& path, const Checkpoint& ckpt) {
    require_file(path, "dataset");
    DatasetSplit split;
    const std::string ext = fs::path(path).extension().string();
    if (ext == ".jsonl") {
        TokenDump dump = read_jsonl(path);
        require_vocab_hash(ckpt, dump.vocab_hash);
        if (dump.num_classes != ckpt.config.model.num_classes)
            throw DataError("class count mismatch: checkpoint=" + std::to_string(ckpt.config.model.num_classes) +
                            " dataset=" + std::to_string(dump.num_classes));
        split.examples = std::move(dump.examples);
        split.num_classes = dump.num_classes;
        split.vocab = ckpt.vocab;
    } else if (ext == ".csv") {
        split = load_agnews_csv(path, ckpt.vocab, ckpt.config.model.encoder.max_len);
        if (split.num_classes != ckpt.config.model.num_classes)
            throw DataError("class count mismatch: checkpoint=" + std::to_string(ckpt.config.model.num_classes) +
                            " dataset=" + std::to_string(split.num_classes));
    } else {
        throw DataError("unsupported dataset format '" + ext + "' (expected .jsonl or .csv): " + path);
    }
    if (split.examples.empty()) throw DataError("dataset is empty: " + path);
    try {
        split.validate();
    } catch (const ContractError& e) {
        throw DataError(std::string("dataset does not fit the checkpoint: ") + e.what());
    }
    return split;
}

int cmd_train(const std::string& config_path, const std::string& out_dir, std::ostream& out) {
    RunConfig rc = load_run_config(config_path);
    check_before_work(rc);
    prepare_out_dir(out_dir);
    SplitPair data = load_data(rc.data, rc.train.model.encoder.max_len);
    const TrainConfig cfg = bind_to_data(rc.train, data.train);

    std::ofstream log(fs::path(out_dir) / "train.log");
    log << timestamp() << " start train=" << data.train.size() << " eval=" << data.eval.size() << "\n";
    TrainHooks hooks;
    hooks.on_epoch = [&](const EpochRecord& r) {
        log << timestamp() << " epoch=" << r.epoch << " seconds=" << r.seconds << " loss=" << r.train_loss << "\n";
        log.flush();
    };
    TrainResult result = train(cfg, data.train, data.eval, hooks);
    log << timestamp() << " done\n";

    const fs::path dir(out_dir);
    save_checkpoint((dir / "model.ckpt").string(), result.model, cfg, *data.train.vocab);
    write_text(dir / "history.csv", history_csv(result.history));
    write_jsonl((dir / "eval.jsonl").string(), data.eval);
    const auto& last = result.history.epochs.back();
    if (last.eval) write_text(dir / "metrics.csv", report_csv(*last.eval));
    out << "trained " << cfg.epochs << " epochs: train_loss=" << last.train_loss;
    if (last.eval) out << " eval_accuracy=" << last.eval->accuracy << " eval_auc=" << last.eval->macro_ovr_auc;
    out << "\n";
    return kOk;
}

int cmd_eval(const std::string& ckpt_path, const std::string& data_path, const std::string& out_path,
             std::ostream& out) {
    require_file(ckpt_path, "checkpoint");
    const Checkpoint ckpt = load_checkpoint(ckpt_path);
    const DatasetSplit split = load_eval_split(data_path, ckpt);
    const std::string csv = report_csv(evaluate(ckpt.model, split));
    if (out_path.empty()) out << csv;
    else write_text(out_path, csv);
    return kOk;
}

int cmd_sweep(const std::string& config_path, const std::string& rates_text, const std::string& out_dir,
              std::size_t threads, std::ostream& out) {
    const std::vector<double> rates = parse_rates(rates_text);
    RunConfig rc = load_run_config(config_path);
    check_before_work(rc);
    for (double r : rates)
        if (!(r > 0.0)) throw ConfigError("sweep learning rates must be > 0");
    prepare_out_dir(out_dir);
    SplitPair data = load_data(rc.data, rc.train.model.encoder.max_len);
    const SweepReport report = lr_sweep(bind_to_data(rc.train, data.train), rates, data.train, data.eval, threads);
    const fs::path dir(out_dir);
    write_text(dir / "sweep.csv", sweep_csv(report));
    write_text(dir / "sweep.svg", sweep_svg(report));
    out << sweep_csv(report);
    return kOk;
}

int cmd_gradcheck(const std::string& scope_text, bool inject_fault, std::ostream& out, std::ostream& err) {
    const auto scope = parse_grad_scope(scope_text);
    if (!scope) throw ConfigError("--scope must be op, module, endtoend or all; got '" + scope_text + "'");
    std::vector<GradCheckCase> extra;
    if (inject_fault) extra.push_back(faulty_relu_case());
    const auto results = run_gradchecks(*scope, extra);
    out << format_gradcheck_table(results);
    std::string failed;
    for (const auto& r : results)
        if (!r.passed()) failed += (failed.empty() ? "" : ",") + r.name;
    if (failed.empty()) return kOk;
    err << "error[numeric]: gradient check failed: " << failed << "\n";
    return kNumericError;
}

std::string pyramid_json(const ForwardTrace& trace, std::size_t index) {
    using ojson = nlohmann::ordered_json;
    ojson levels = ojson::array();
    for (const auto& lv : trace.levels)
        levels.push_back({{"level", lv.level},
                          {"scale", lv.scale},
                          {"rows", lv.features.rows()},
                          {"cols", lv.features.cols()},
                          {"frobenius_norm", frobenius_norm(lv.features)}});
    ojson j = {{"index", index},
              {"n", trace.fused.rows()},
              {"levels", levels},
              {"fused",
               {{"rows", trace.fused.rows()},
                {"cols", trace.fused.cols()},
                {"frobenius_norm", frobenius_norm(trace.fused)}}}};
    return j.dump(2) + "\n";
}

int cmd_dump(bool graph, bool pyramid, long long index, const std::string& ckpt_path, const std::string& data_path,
             const std::string& out_path, std::ostream& out) {
    if (graph == pyramid) throw ConfigError("dump needs exactly one of --graph or --pyramid");
    require_file(ckpt_path, "checkpoint");
    const Checkpoint ckpt = load_checkpoint(ckpt_path);
    const DatasetSplit split = load_eval_split(data_path, ckpt);
    if (index < 0 || static_cast<std::size_t>(index) >= split.size())
        throw DataError("example index " + std::to_string(index) + " out of range [0, " +
                        std::to_string(split.size()) + ")");
    Tape tape(false);
    const auto& ex = split.examples[static_cast<std::size_t>(index)];
    const ForwardTrace trace = ckpt.model.forward(tape, ex.tokens);
    const std::string text = graph ? dump_edge_list(trace.graph) : pyramid_json(trace, static_cast<std::size_t>(index));
    if (out_path.empty()) out << text;
    else write_text(out_path, text);
    return kOk;
}

int cmd_gen_data(const std::string& config_path, const std::string& out_dir, std::ostream& out) {
    RunConfig rc = load_run_config(config_path);
    check_before_work(rc);
    prepare_out_dir(out_dir);
    SplitPair data = load_data(rc.data, rc.train.model.encoder.max_len);
    const fs::path dir(out_dir);
    write_jsonl((dir / "train.jsonl").string(), data.train);
    write_jsonl((dir / "eval.jsonl").string(), data.eval);
    out << "wrote " << data.train.size() << " train and " << data.eval.size() << " eval examples\n";
    return kOk;
}

std::string one_line(std::string s) {
    for (auto& c : s)
        if (c == '\n' || c == '\r') c = ' ';
    return s;
}

} // namespace

RunConfig parse_run_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    RunConfig rc;
    rc.train = train_config_from_json(j, false, {"data"});
    if (j.contains("data")) rc.data = parse_data(j.at("data"));
    apply_seed_override(rc.train);
    return rc;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str());
}

SplitPair load_data(const DataSpec& spec, std::size_t max_len) {
    if (spec.kind == DataKind::agnews) return load_agnews_splits(spec.agnews, max_len);
    return make_synthetic_splits(spec.synthetic, spec.eval_per_class);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"pyratext: pyramid-graph text classifier"};
    app.require_subcommand(1);

    std::string config, out_dir, ckpt, data, rates = "1e-5,1e-4,1e-3", scope = "all", out_file;
    std::size_t threads = 1;
    long long index = 0;
    bool graph = false, pyramid = false, inject = false;

    auto* train = app.add_subcommand("train", "Train on the configured data; writes checkpoint and CSV reports");
    train->add_option("--config", config, "JSON config file")->required();
    train->add_option("--out", out_dir, "Output directory")->required();

    auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint; prints the metric report CSV");
    eval->add_option("--ckpt", ckpt, "Checkpoint file")->required();
    eval->add_option("--data", data, "Token dump (.jsonl) or AG News CSV")->required();
    eval->add_option("--out", out_file, "Write the CSV here instead of stdout");

    auto* sweep = app.add_subcommand("sweep", "Learning-rate sweep; writes sweep.csv and sweep.svg");
    sweep->add_option("--config", config, "JSON config file")->required();
    sweep->add_option("--rates", rates, "Comma-separated learning rates")->capture_default_str();
    sweep->add_option("--out", out_dir, "Output directory")->default_val(".");
    sweep->add_option("--threads", threads, "Rates trained concurrently")->capture_default_str();

    auto* grad = app.add_subcommand("gradcheck", "Finite-difference gradient checks");
    grad->add_option("--scope", scope, "op, module, endtoend or all")->capture_default_str();
    grad->add_flag("--inject-fault", inject, "Add a relu with a broken backward rule")->group("");

    auto* dump = app.add_subcommand("dump", "Debug dump of one example's graph or pyramid");
    dump->add_flag("--graph", graph, "Edge list: header 'n d_p', then 'u v c_vu'");
    dump->add_flag("--pyramid", pyramid, "Per-level shapes and norms as JSON");
    dump->add_option("--index", index, "Example index")->required();
    dump->add_option("--ckpt", ckpt, "Checkpoint file")->required();
    dump->add_option("--data", data, "Token dump (.jsonl) or AG News CSV")->required();
    dump->add_option("--out", out_file, "Write here instead of stdout");

    auto* gen = app.add_subcommand("gen-data", "Write the configured splits as token dumps");
    gen->add_option("--config", config, "JSON config file")->required();
    gen->add_option("--out", out_dir, "Output directory")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e, out, err);
        err << "error[config]: " << one_line(e.what()) << "\n";
        return kConfigError;
    }

    try {
        if (train->parsed()) return cmd_train(config, out_dir, out);
        if (eval->parsed()) return cmd_eval(ckpt, data, out_file, out);
        if (sweep->parsed()) return cmd_sweep(config, rates, out_dir, threads, out);
        if (grad->parsed()) return cmd_gradcheck(scope, inject, out, err);
        if (dump->parsed()) return cmd_dump(graph, pyramid, index, ckpt, data, out_file, out);
        if (gen->parsed()) return cmd_gen_data(config, out_dir, out);
    } catch (const ConfigError& e) {
        err << "error[config]: " << one_line(e.what()) << "\n";
        return kConfigError;
    } catch (const NumericError& e) {
        err << "error[numeric]: " << one_line(e.what()) << "\n";
        return kNumericError;
    } catch (const DataError& e) {
        err << "error[data]: " << one_line(e.what()) << "\n";
        return kDataError;
    } catch (const FormatError& e) {
        err << "error[data]: " << one_line(e.what()) << "\n";
        return kDataError;
    } catch (const UndefinedMetricError& e) {
        err << "error[data]: " << one_line(e.what()) << "\n";
        return kDataError;
    } catch (const std::exception& e) {
        err << "error[internal]: " << one_line(e.what()) << "\n";
        return kInternalError;
    }
    return kInternalError;
}

} // namespace pyratext::cli
