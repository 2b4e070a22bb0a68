// Command-line driver: every pipeline stage as a subcommand.
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tabfact/config_file.hpp"
#include "tabfact/datagen.hpp"
#include "tabfact/ingest.hpp"
#include "tabfact/metrics.hpp"
#include "tabfact/preprocess.hpp"
#include "tabfact/train.hpp"

namespace fs = std::filesystem;
using namespace tabfact;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
};

void apply_section(const ConfigFile& cfg, const std::string& name,
                   const std::function<void(const std::string&, const std::string&)>& set) {
    for (const auto& [k, v] : cfg.section(name)) set(k, v);
}

// ---------------------------------------------------------------------------------------------

int cmd_datagen(const Common& c, const std::string& profile_name, int n_tables, bool header_suite, int per_case) {
    const std::uint64_t seed = c.seed.value_or(1);
    const fs::path out(c.out_dir);
    if (header_suite) {
        const Dataset d = gen_header_suite(seed, per_case);
        save_dataset_json(d, out / "headers.json");
        save_header_manifest(header_manifest(d), out / "headers.tsv");
        std::printf("wrote %zu tables to %s\n", d.tables.size(), (out / "headers.json").c_str());
        return 0;
    }
    CorpusProfile p = corpus_profile(profile_name);
    if (!c.config.empty()) {
        apply_section(load_config(c.config), "datagen", [&](const std::string& k, const std::string& v) {
            if (k == "n_tables") p.n_tables = std::stoi(v);
            else if (k == "per_table") p.mix.per_table = std::stoi(v);
            else if (k == "min_body_rows") p.shape.min_body_rows = std::stoi(v);
            else if (k == "max_body_rows") p.shape.max_body_rows = std::stoi(v);
            else if (k == "min_cols") p.shape.min_cols = std::stoi(v);
            else if (k == "max_cols") p.shape.max_cols = std::stoi(v);
            else if (k == "value_min") p.shape.value_min = std::stoi(v);
            else if (k == "value_max") p.shape.value_max = std::stoi(v);
            else if (k == "refute_fraction") p.mix.refute_fraction = std::stod(v);
            else if (k == "argument_perturbation") p.mix.argument_perturbation = std::stod(v);
            else if (k == "with_unknowns") p.with_unknowns = v == "true" || v == "1";
            else throw Error("unknown datagen setting '" + k + "'");
        });
    }
    if (n_tables > 0) p.n_tables = n_tables;
    const Split s = gen_corpus(p, seed);
    for (const Dataset* d : {&s.train, &s.validation, &s.test}) {
        save_dataset_json(*d, out / (d->split_name + ".json"));
        std::printf("%-10s %4zu tables %5zu statements\n", d->split_name.c_str(), d->tables.size(), d->statements.size());
    }
    return 0;
}

int cmd_ingest(const Common& c, const std::vector<std::string>& inputs, std::string format, const std::string& out,
               const std::string& oracle_out) {
    Dataset d;
    std::map<std::string, int> oracle;
    for (const auto& in : inputs) {
        const fs::path p(in);
        std::string f = format;
        if (f == "auto") {
            const auto ext = p.extension().string();
            f = ext == ".csv" ? "csv" : (ext == ".xml" || ext == ".html" || ext == ".htm") ? "xml" : "json";
        }
        if (f == "json") {
            Dataset part = load_dataset_json(p);
            for (auto& [id, t] : part.tables) {
                if (!d.tables.emplace(id, std::move(t)).second) throw SchemaError("duplicate table id '" + id + "'");
            }
            d.statements.insert(d.statements.end(), part.statements.begin(), part.statements.end());
        } else if (f == "csv" || f == "xml") {
            const std::string bytes = read_file(p);
            RawTable t = f == "csv" ? parse_csv_table(bytes, p.stem().string()) : parse_xml_table(bytes, p.stem().string());
            require_valid(t);
            if (f == "xml") {
                const HeaderOracle h = extract_header_oracle(bytes, t.table_id);
                if (h.header_row_count > 0) oracle[t.table_id] = h.header_row_count;
            }
            const std::string id = t.table_id;
            if (!d.tables.emplace(id, std::move(t)).second) throw SchemaError("duplicate table id '" + id + "'");
        } else {
            throw Error("unknown input format '" + f + "' (expected auto, csv, xml or json)");
        }
    }
    for (const auto& s : d.statements) validate_statement(s, d.table_of(s));
    const fs::path target = out.empty() ? fs::path(c.out_dir) / "dataset.json" : fs::path(out);
    save_dataset_json(d, target);
    if (!oracle_out.empty()) save_header_manifest(oracle, oracle_out);
    std::printf("%zu tables, %zu statements -> %s\n", d.tables.size(), d.statements.size(), target.c_str());
    return 0;
}

int cmd_preprocess(const Common& c, const std::string& data, const std::string& out, bool standardize) {
    const Dataset d = load_dataset_json(data);
    nlohmann::json doc = nlohmann::json::object();
    for (const auto& [id, raw] : d.tables) {
        const SingleCellTable expanded = expand_spans(raw);
        const int h = predict_header_rows(expanded);
        const SingleCellTable t = standardize ? standardize_header(expanded, h) : single_header(expanded);
        nlohmann::json grid = nlohmann::json::array(), origin = nlohmann::json::array();
        for (int r = 0; r < t.n_rows(); ++r) {
            nlohmann::json row = nlohmann::json::array(), orow = nlohmann::json::array();
            for (int col = 0; col < t.n_cols(); ++col) {
                row.push_back(t.grid(r, col));
                orow.push_back(t.span_origin(r, col));
            }
            grid.push_back(row);
            origin.push_back(orow);
        }
        doc[id] = {{"predicted_header_rows", h},
                   {"merged_header_rows", t.merged_header_rows},
                   {"grid", grid},
                   {"span_origin", origin}};
    }
    const fs::path target = out.empty() ? fs::path(c.out_dir) / "prepared.json" : fs::path(out);
    write_file(target, doc.dump(1) + "\n");
    std::printf("%zu tables -> %s\n", d.tables.size(), target.c_str());
    return 0;
}

int cmd_headers_eval(const std::vector<std::string>& data, const std::vector<std::string>& manifests,
                     const std::string& out) {
    if (data.size() != manifests.size()) throw Error("give one --manifest per --data file");
    std::vector<HeaderEvalRow> rows;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const Dataset d = load_dataset_json(data[i]);
        rows.push_back(evaluate_header_predictions(d, load_header_manifest(manifests[i]), fs::path(data[i]).stem().string()));
    }
    const std::string text = format_header_eval(rows);
    if (!out.empty()) write_file(out, text);
    std::cout << text;
    return 0;
}

void configure_training(const Common& c, Task task, TrainConfig& tc, nn::EncoderConfig& ec) {
    tc = default_train_config(task);
    if (!c.config.empty()) {
        const ConfigFile cfg = load_config(c.config);
        apply_section(cfg, "train", [&](const std::string& k, const std::string& v) { set_train_field(tc, k, v); });
        apply_section(cfg, "encoder", [&](const std::string& k, const std::string& v) { set_encoder_field(ec, k, v); });
    }
    if (c.seed) {
        tc.seed = *c.seed;
        ec.seed = *c.seed;
    }
}

int cmd_train(const Common& c, const std::string& task_name, const std::string& variant_name, const std::string& train_path,
              const std::string& val_path, const std::string& init_from, std::optional<int> max_len,
              std::optional<double> threshold) {
    const Task task = parse_task(task_name);
    const Variant variant = parse_variant(variant_name);
    if (task == Task::Verdict && variant != Variant::Base) throw Error("--variant applies to task B only");
    TrainInputs in;
    in.task = task;
    in.variant = variant;
    configure_training(c, task, in.config, in.encoder);
    if (max_len) in.config.max_len = *max_len;
    if (threshold) in.config.threshold = *threshold;
    const Dataset train_set = load_dataset_json(train_path);
    const Dataset val_set = load_dataset_json(val_path);
    in.train = &train_set;
    in.validation = &val_set;
    if (!init_from.empty()) in.init_from = fs::path(init_from);
    in.run_dir = c.out_dir;
    in.progress = [](const std::string& s) {
        std::fprintf(stderr, "%s\n", s.c_str());
    };
    if (variant == Variant::Separate) {
        const SeparateResult r = train_separate(in);
        std::printf("entailed model: %s (metric %s)\n", r.entailed.best_checkpoint.c_str(),
                    format_fixed2(r.entailed.best_metric).c_str());
        std::printf("refuted model: %s (metric %s)\n", r.refuted.best_checkpoint.c_str(),
                    format_fixed2(r.refuted.best_metric).c_str());
        return 0;
    }
    const TrainResult r = train(in);
    std::printf("best checkpoint: %s (step %ld, %s %s)\n", r.best_checkpoint.c_str(), r.best_step,
                in.config.selection_metric.c_str(), format_fixed2(r.best_metric).c_str());
    if (r.skipped_examples > 0) std::printf("skipped %d oversize training examples\n", r.skipped_examples);
    return 0;
}

fs::path best_in(const fs::path& dir) {
    const auto manifest = dir / "best.json";
    if (!fs::exists(manifest)) throw Error("'" + dir.string() + "' has no best.json; pass a .ckpt file or a run directory");
    const auto j = nlohmann::json::parse(read_file(manifest));
    return dir / j.at("checkpoint").get<std::string>();
}

int cmd_predict(const Common& c, const std::string& task_name, const std::string& checkpoint, const std::string& data,
                const std::string& out, std::optional<int> max_len_flag, std::optional<double> threshold_flag) {
    const Task task = parse_task(task_name);
    const Dataset d = load_dataset_json(data);
    const fs::path target = out.empty() ? fs::path(c.out_dir) / "predictions.json" : fs::path(out);
    const fs::path ck(checkpoint);
    const bool separate = fs::is_directory(ck) && !fs::exists(ck / "best.json") && fs::exists(ck / "entailed") &&
                          fs::exists(ck / "refuted");
    if (separate) {
        if (task != Task::Evidence) throw Error("a separate-variant run directory holds task B models");
        const LoadedModel a = load_model(best_in(ck / "entailed"));
        const LoadedModel b = load_model(best_in(ck / "refuted"));
        const int max_len = max_len_flag.value_or(a.train.max_len);
        const double thr = threshold_flag.value_or(a.train.threshold);
        write_evidence_predictions(route_separate(a, b, d, thr, max_len), target);
    } else {
        const LoadedModel m = load_model(fs::is_directory(ck) ? best_in(ck) : ck);
        if (m.task != task) {
            throw Error("checkpoint was trained for task " + std::string(to_string(m.task)) + ", not " +
                        std::string(to_string(task)));
        }
        const int max_len = max_len_flag.value_or(m.train.max_len);
        if (task == Task::Verdict) {
            write_predictions(predict_verdict(m, d, max_len), target);
        } else {
            write_evidence_predictions(predict_cells(m, d, threshold_flag.value_or(m.train.threshold), max_len), target);
        }
    }
    std::printf("predictions -> %s\n", target.c_str());
    return 0;
}

std::string verdict_report(const std::string& name, const VerdictEvaluation& e) {
    return "Statement verification (F1-micro)\n" + format_verdict_table({{name, e}}) + "\nConfusion matrix\n" +
           format_confusion(e.confusion) + "\nLength buckets\n" + format_length_buckets(e.buckets);
}

std::string evidence_report(const std::string& name, const EvidenceEvaluation& e) {
    return "Evidence finding (F1)\n" + format_evidence_table({{name, e}}) + "\nCell confusion matrix\n" +
           format_cell_confusion(e.confusion) + "\nLength buckets\n" + format_length_buckets(e.buckets);
}

int cmd_evaluate(const Common& c, const std::string& task_name, const std::string& gold_path, const std::string& pred_path,
                 bool plain_2way, bool micro, int length_limit, bool write_files) {
    const Task task = parse_task(task_name);
    const Dataset gold = load_dataset_json(gold_path);
    const std::string name = fs::path(pred_path).stem().string();
    std::string text, json;
    if (task == Task::Verdict) {
        const auto e = evaluate_verdicts(gold, read_predictions(pred_path),
                                         plain_2way ? TwoWayMode::PlainError : TwoWayMode::PenalizeRecall, length_limit);
        text = verdict_report(name, e);
        json = verdict_evaluation_json(e);
    } else {
        auto e = evaluate_evidence(gold, read_evidence_predictions(pred_path), length_limit);
        if (micro) e.f1 = e.f1_micro_cells;
        text = evidence_report(name, e);
        json = evidence_evaluation_json(e);
    }
    std::cout << text;
    if (write_files) {
        write_file(fs::path(c.out_dir) / "report.txt", text);
        write_file(fs::path(c.out_dir) / "report.json", json);
    }
    return 0;
}

int cmd_report(const Common& c, const std::string& task_name, const std::string& gold_path,
               const std::vector<std::string>& preds, const std::string& out) {
    const Task task = parse_task(task_name);
    const Dataset gold = load_dataset_json(gold_path);
    std::string text;
    auto split_pair = [](const std::string& s) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) return std::pair{fs::path(s).stem().string(), s};
        return std::pair{s.substr(0, eq), s.substr(eq + 1)};
    };
    if (task == Task::Verdict) {
        std::vector<std::pair<std::string, VerdictEvaluation>> rows;
        for (const auto& p : preds) {
            const auto [name, path] = split_pair(p);
            rows.emplace_back(name, evaluate_verdicts(gold, read_predictions(path)));
        }
        text = format_verdict_table(rows);
    } else {
        std::vector<std::pair<std::string, EvidenceEvaluation>> rows;
        for (const auto& p : preds) {
            const auto [name, path] = split_pair(p);
            rows.emplace_back(name, evaluate_evidence(gold, read_evidence_predictions(path)));
        }
        text = format_evidence_table(rows);
    }
    const fs::path target = out.empty() ? fs::path(c.out_dir) / "comparison.txt" : fs::path(out);
    write_file(target, text);
    std::cout << text;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tabfact: table fact verification and evidence finding"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config, "Settings file with [train], [encoder] and [datagen] sections")
            ->check(CLI::ExistingFile);
        sub->add_option("--seed", common.seed, "Random seed (overrides the config file)");
        sub->add_option("--out-dir", common.out_dir, "Directory for outputs");
    };

    std::function<int()> run;

    // datagen
    std::string profile = "verdict";
    int n_tables = 0, per_case = 20;
    bool header_suite = false;
    auto* datagen = app.add_subcommand("datagen", "Generate a synthetic corpus split into train/validation/test");
    add_common(datagen);
    datagen->add_option("--profile", profile, "Corpus profile")
        ->check(CLI::IsMember(corpus_profile_names()));
    datagen->add_option("--n-tables", n_tables, "Override the profile's table count (0 keeps it)");
    datagen->add_flag("--header-suite", header_suite, "Generate the header-rule suite and its manifest instead");
    datagen->add_option("--per-case", per_case, "Header-suite tables per rule case");
    datagen->callback([&] { run = [&] { return cmd_datagen(common, profile, n_tables, header_suite, per_case); }; });

    // ingest
    std::vector<std::string> inputs;
    std::string format = "auto", ingest_out, oracle_out;
    auto* ingest = app.add_subcommand("ingest", "Read CSV, XML or dataset JSON files into one validated dataset");
    add_common(ingest);
    ingest->add_option("inputs", inputs, "Input files")->required()->check(CLI::ExistingFile);
    ingest->add_option("--format", format, "Input format")->check(CLI::IsMember({"auto", "csv", "xml", "json"}));
    ingest->add_option("--out", ingest_out, "Output dataset JSON (default <out-dir>/dataset.json)");
    ingest->add_option("--oracle-out", oracle_out, "Write header-row counts found in XML <thead> blocks");
    ingest->callback([&] { run = [&] { return cmd_ingest(common, inputs, format, ingest_out, oracle_out); }; });

    // preprocess
    std::string pre_data, pre_out;
    bool no_standardize = false;
    auto* preprocess = app.add_subcommand("preprocess", "Expand spans, predict headers and standardize every table");
    add_common(preprocess);
    preprocess->add_option("--data", pre_data, "Dataset JSON")->required()->check(CLI::ExistingFile);
    preprocess->add_option("--out", pre_out, "Output JSON (default <out-dir>/prepared.json)");
    preprocess->add_flag("--no-standardize", no_standardize, "Keep only the first row as header");
    preprocess->callback([&] { run = [&] { return cmd_preprocess(common, pre_data, pre_out, !no_standardize); }; });

    // headers-eval
    std::vector<std::string> he_data, he_manifest;
    std::string he_out;
    auto* headers = app.add_subcommand("headers-eval", "Compare predicted header rows with oracle counts");
    add_common(headers);
    headers->add_option("--data", he_data, "Dataset JSON (repeatable)")->required()->check(CLI::ExistingFile);
    headers->add_option("--manifest", he_manifest, "Oracle manifest TSV, one per --data")->required()->check(CLI::ExistingFile);
    headers->add_option("--out", he_out, "Also write the TSV report here");
    headers->callback([&] { run = [&] { return cmd_headers_eval(he_data, he_manifest, he_out); }; });

    // train
    std::string task = "A", variant = "base", train_path, val_path, init_from;
    std::optional<int> max_len;
    std::optional<double> threshold;
    auto* train_cmd = app.add_subcommand("train", "Train a verdict (A) or evidence (B) model");
    add_common(train_cmd);
    train_cmd->add_option("--task", task, "A (verdict) or B (evidence)")->check(CLI::IsMember({"A", "B"}));
    train_cmd->add_option("--variant", variant, "Task B strategy")->check(CLI::IsMember({"base", "statement", "separate"}));
    train_cmd->add_option("--train", train_path, "Training dataset JSON")->required()->check(CLI::ExistingFile);
    train_cmd->add_option("--validation", val_path, "Validation dataset JSON")->required()->check(CLI::ExistingFile);
    train_cmd->add_option("--init-from", init_from, "Checkpoint to start from")->check(CLI::ExistingFile);
    train_cmd->add_option("--max-len", max_len, "Maximum sequence length (default 512)");
    train_cmd->add_option("--threshold", threshold, "Cell selection threshold for validation (default 0.5)");
    train_cmd->callback([&] {
        run = [&] { return cmd_train(common, task, variant, train_path, val_path, init_from, max_len, threshold); };
    });

    // predict
    std::string checkpoint, pred_data, pred_out;
    auto* predict = app.add_subcommand("predict", "Write predictions for a dataset");
    add_common(predict);
    predict->add_option("--task", task, "A (verdict) or B (evidence)")->check(CLI::IsMember({"A", "B"}));
    predict->add_option("--checkpoint", checkpoint, "Checkpoint file or run directory")->required()->check(CLI::ExistingPath);
    predict->add_option("--data", pred_data, "Dataset JSON")->required()->check(CLI::ExistingFile);
    predict->add_option("--out", pred_out, "Output file (default <out-dir>/predictions.json)");
    predict->add_option("--max-len", max_len, "Maximum sequence length (default: the checkpoint's)");
    predict->add_option("--threshold", threshold, "Cell selection threshold (default: the checkpoint's)");
    predict->callback([&] {
        run = [&] { return cmd_predict(common, task, checkpoint, pred_data, pred_out, max_len, threshold); };
    });

    // evaluate
    std::string gold, pred;
    bool plain_2way = false, micro = false, write_reports = false;
    int length_limit = 512;
    auto* evaluate = app.add_subcommand("evaluate", "Score predictions against gold labels");
    add_common(evaluate);
    evaluate->add_option("--task", task, "A (verdict) or B (evidence)")->check(CLI::IsMember({"A", "B"}));
    evaluate->add_option("--gold", gold, "Gold dataset JSON")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--pred", pred, "Predictions JSON")->required()->check(CLI::ExistingFile);
    evaluate->add_flag("--plain-2way", plain_2way, "Count Unknown predictions as ordinary errors in the 2-way score");
    evaluate->add_flag("--micro", micro, "Report evidence F1 over pooled cells instead of the statement mean");
    evaluate->add_option("--length-limit", length_limit, "Sequence length separating the two length buckets");
    evaluate->add_flag("--write", write_reports, "Write report.txt and report.json into --out-dir");
    evaluate->callback([&] {
        run = [&] { return cmd_evaluate(common, task, gold, pred, plain_2way, micro, length_limit, write_reports); };
    });

    // report
    std::vector<std::string> systems;
    std::string report_out;
    auto* report = app.add_subcommand("report", "Side-by-side comparison of several prediction files");
    add_common(report);
    report->add_option("--task", task, "A (verdict) or B (evidence)")->check(CLI::IsMember({"A", "B"}));
    report->add_option("--gold", gold, "Gold dataset JSON")->required()->check(CLI::ExistingFile);
    report->add_option("--pred", systems, "NAME=PATH (repeatable)")->required();
    report->add_option("--out", report_out, "Output text file (default <out-dir>/comparison.txt)");
    report->callback([&] { run = [&] { return cmd_report(common, task, gold, systems, report_out); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        return run();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
