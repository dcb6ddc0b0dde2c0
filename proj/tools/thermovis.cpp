// thermovis: preprocess, synth, train, evaluate and report from one binary.
//
//   thermovis synth --subjects 30 --images 12 --seed 7 --out data/synth
//   thermovis train --descriptor run.json [--set train.max_epochs=20]
//   thermovis evaluate --descriptor run.json
//   thermovis report --descriptor run.json
//
// Descriptor precedence: explicit flags > --set overrides > descriptor file > defaults.

#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "thermovis/core/error.hpp"
#include "thermovis/core/hash.hpp"
#include "thermovis/pipeline/commands.hpp"

namespace tv = thermovis;

namespace {

struct GlobalFlags {
    std::string descriptor;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<std::string> out;
    std::optional<std::string> root;
    std::optional<std::string> kind;
    std::vector<std::string> overrides;
};

tv::RunDescriptor resolve(const GlobalFlags& g) {
    nlohmann::json doc = tv::RunDescriptor{}.to_json();
    if (!g.descriptor.empty()) doc = tv::read_descriptor(g.descriptor).to_json();
    for (const auto& o : g.overrides) tv::apply_override(doc, o);
    tv::RunDescriptor d = tv::RunDescriptor::from_json(doc);
    if (g.seed) d.seed = *g.seed;
    if (g.workers) d.workers = *g.workers;
    if (g.out) d.out = *g.out;
    if (g.root) d.dataset_root = *g.root;
    if (g.kind) d.dataset_kind = tv::parse_dataset_kind(*g.kind);
    d.validate();
    return d;
}

void log_line(const std::string& msg) { std::cerr << msg << std::endl; }

int fail(const std::string& command, std::string_view code, const std::string& message, int exit_code) {
    nlohmann::json err = {{"command", command}, {"error", std::string(code)}, {"message", message}};
    std::cerr << err.dump() << std::endl;
    return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"thermovis: visible-to-thermal face mapping and cross-spectral identification"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalFlags g;
    app.add_option("--descriptor", g.descriptor, "Run descriptor (JSON)");
    app.add_option("--seed", g.seed, "Base seed");
    app.add_option("--workers", g.workers, "Worker threads (1 = reproducibility mode)");
    app.add_option("--out", g.out, "Output directory");
    app.add_option("--root", g.root, "Dataset root (overrides dataset.root)");
    app.add_option("--kind", g.kind, "Dataset kind: carl, undx1, eurecom, generic");
    app.add_option("--set", g.overrides, "Descriptor override, e.g. train.max_epochs=20 (repeatable)");

    auto* synth = app.add_subcommand("synth", "Generate a synthetic paired dataset");
    tv::SyntheticConfig scfg;
    synth->add_option("--subjects", scfg.n_subjects, "Number of subjects");
    synth->add_option("--images", scfg.images_per_subject, "Images per subject and modality");
    synth->add_option("--size", scfg.size, "Image side length in pixels");

    auto* preprocess = app.add_subcommand("preprocess", "Fill the preprocessing cache");
    auto* train = app.add_subcommand("train", "Train n_runs models");
    auto* evaluate = app.add_subcommand("evaluate", "Score trained models under each gallery policy");
    auto* report = app.add_subcommand("report", "Render results as text, CSV and JSON tables");
    std::vector<std::string> results_dirs;
    std::string reports_dir;
    report->add_option("--results", results_dirs, "Results directories (default: the descriptor's)");
    report->add_option("--reports", reports_dir, "Where to write the tables (default: the descriptor's)");

    std::string command = "thermovis";
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(command, "usage_error", e.what(), 2);
    }

    try {
        if (synth->parsed()) {
            command = "synth";
            if (!g.out) return fail(command, "usage_error", "synth requires --out", 2);
            if (g.seed) scfg.seed = *g.seed;
            const tv::DatasetManifest m = tv::cmd_synth(scfg, *g.out);
            std::cout << nlohmann::json{{"root", *g.out},
                                        {"subjects", m.subjects().size()},
                                        {"images", m.samples.size()},
                                        {"pairs", m.pairing.size()}}
                             .dump()
                      << std::endl;
            return 0;
        }
        const tv::RunDescriptor d = resolve(g);
        const tv::RunLayout layout(d);
        if (preprocess->parsed()) {
            command = "preprocess";
            const auto data = tv::cmd_preprocess(d, log_line);
            nlohmann::json out = data.summary.to_json();
            out["descriptor_hash"] = d.hash();
            std::cout << out.dump() << std::endl;
        } else if (train->parsed()) {
            command = "train";
            const auto runs = tv::cmd_train(d, log_line);
            nlohmann::json out = {{"descriptor_hash", d.hash()}, {"runs", nlohmann::json::array()}};
            for (const auto& r : runs) {
                const auto& last = r.history.epochs.back();
                out["runs"].push_back({{"seed", r.split.seed},
                                       {"epochs", last.epoch},
                                       {"train_loss", last.train_loss},
                                       {"validation_loss", last.validation_loss}});
            }
            std::cout << out.dump() << std::endl;
        } else if (evaluate->parsed()) {
            command = "evaluate";
            const auto results = tv::cmd_evaluate(d, log_line);
            std::cout << tv::emit_report(results, tv::ReportFormat::text);
        } else if (report->parsed()) {
            command = "report";
            std::vector<std::filesystem::path> dirs(results_dirs.begin(), results_dirs.end());
            if (dirs.empty()) dirs.push_back(layout.results());
            std::cout << tv::cmd_report(dirs, reports_dir.empty() ? layout.reports()
                                                                   : std::filesystem::path(reports_dir));
        }
    } catch (const tv::Error& e) {
        const int code = e.code() == tv::ErrorCode::invalid_argument || e.code() == tv::ErrorCode::config_error ? 2 : 1;
        return fail(command, tv::to_string(e.code()), e.what(), code);
    } catch (const std::exception& e) {
        return fail(command, "internal_error", e.what(), 1);
    }
    return 0;
}
