#include <cstdlib>
#include <fstream>

#include "doctest.h"
#include "helpers.hpp"
#include "thermovis/imaging/io.hpp"
#include "tiny_pipeline.hpp"

using namespace thermovis;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code;
    std::string out, err;
};

CliResult cli(const std::string& args, const fs::path& scratch) {
    const fs::path out = scratch / "stdout.txt", err = scratch / "stderr.txt";
    const std::string cmd = std::string(TV_CLI) + " " + args + " >" + out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, tiny::read_bytes(out), tiny::read_bytes(err)};
}

nlohmann::json last_json_line(const std::string& text) {
    auto end = text.find_last_not_of('\n');
    auto start = text.rfind('\n', end);
    return nlohmann::json::parse(text.substr(start == std::string::npos ? 0 : start + 1, end + 1));
}

}  // namespace

TEST_CASE("run descriptor") {
    const RunDescriptor d;
    d.validate();
    CHECK(RunDescriptor::from_json(d.to_json()).to_json() == d.to_json());
    CHECK(RunDescriptor::from_json(nlohmann::json::object()).hash() == d.hash());

    RunDescriptor moved = d;
    moved.out = "elsewhere";
    moved.workers = 4;
    CHECK(moved.hash() == d.hash());
    RunDescriptor reseeded = d;
    reseeded.seed = 1;
    CHECK(reseeded.hash() != d.hash());

    nlohmann::json doc = d.to_json();
    apply_override(doc, "train.max_epochs=20");
    apply_override(doc, "model.encoder_channels=[8,16]");
    apply_override(doc, "dataset.root=some/where");
    apply_override(doc, "evaluation.gallery_policies=[\"all\"]");
    const RunDescriptor o = RunDescriptor::from_json(doc);
    CHECK(o.train.max_epochs == 20);
    CHECK(o.model.encoder_channels == std::vector<int>{8, 16});
    CHECK(o.dataset_root == "some/where");
    CHECK(o.policies == std::vector<GalleryPolicy>{GalleryPolicy::all_per_subject});
    CHECK(testing::error_code_of([&] { apply_override(doc, "no_equals"); }) == ErrorCode::invalid_argument);
    CHECK(testing::error_code_of([] { RunDescriptor::from_json({{"bogus", 1}}); }) == ErrorCode::config_error);

    CHECK(d.variant_label() == "upconv + DoG (aligned)");
    RunDescriptor plain = d;
    plain.preprocess.dog = false;
    plain.preprocess.align = false;
    plain.model.decoder_variant = DecoderVariant::bilinear;
    CHECK(plain.variant_label() == "bilinear");
    CHECK(d.train_subjects_for(50) == 30);
    RunDescriptor carl = d;
    carl.dataset_kind = DatasetKind::carl;
    CHECK(carl.train_subjects_for(41) == 20);

    testing::TempDir dir("descriptor");
    std::ofstream(dir.path() / "d.json") << R"({"n_runs": 3, "train": {"max_epochs": 7}})";
    const RunDescriptor read = read_descriptor(dir.path() / "d.json");
    CHECK(read.n_runs == 3);
    CHECK(read.train.max_epochs == 7);
    CHECK(read.train.batch_size == TrainConfig{}.batch_size);
    CHECK(testing::error_code_of([&] { read_descriptor(dir.path() / "missing.json"); }) == ErrorCode::not_found);
}

TEST_CASE("prepare_run stamps and checks the descriptor") {
    testing::TempDir dir("prepare");
    RunDescriptor d = tiny::descriptor(dir.path() / "data", dir.path() / "runs");
    const RunLayout layout = prepare_run(d);
    CHECK(layout.root == dir.path() / "runs" / d.hash());
    for (const auto& p : {layout.preprocessed(), layout.checkpoints(), layout.results(), layout.reports()})
        CHECK(fs::is_directory(p));
    CHECK(fs::exists(layout.descriptor_file()));
    prepare_run(d);

    std::ofstream(layout.descriptor_file()) << "{}\n";
    CHECK(testing::error_code_of([&] { prepare_run(d); }) == ErrorCode::fingerprint_mismatch);
}

TEST_CASE("cmd_synth") {
    testing::TempDir dir("synth");
    SyntheticConfig cfg;
    cfg.n_subjects = 30;
    cfg.images_per_subject = 12;
    cfg.seed = 7;
    cfg.size = 32;
    const DatasetManifest m = cmd_synth(cfg, dir.path() / "a");
    CHECK(m.samples.size() == 720);
    CHECK(m.subjects().size() == 30);
    CHECK(fs::exists(dir.path() / "a" / "manifest.csv"));
    CHECK(fs::exists(dir.path() / "a" / "landmarks.csv"));
    cmd_synth(cfg, dir.path() / "b");
    CHECK(tiny::tree_hash(dir.path() / "a") == tiny::tree_hash(dir.path() / "b"));

    cfg.n_subjects = 0;
    CHECK(testing::error_code_of([&] { cmd_synth(cfg, dir.path() / "c"); }) == ErrorCode::invalid_argument);
}

TEST_CASE("preprocessing cache") {
    testing::TempDir dir("preprocess");
    RunDescriptor d = tiny::descriptor(dir.path() / "data", dir.path() / "runs");
    cmd_synth(tiny::corpus(), d.dataset_root);

    const PreparedDataset first = cmd_preprocess(d);
    CHECK(first.summary.total == 48);
    CHECK(first.summary.processed == 48);
    CHECK(first.summary.failures.empty());
    const PreparedDataset second = cmd_preprocess(d);
    CHECK(second.summary.processed == 0);
    CHECK(second.summary.cached == 48);

    const Image vis = load_raw(first.summary.files.begin()->second);
    CHECK(vis.width() == 16);

    SUBCASE("corrupt file is skipped and reported") {
        const std::string victim = first.manifest.samples.front().image_path;
        std::ofstream(fs::path(d.dataset_root) / victim, std::ios::trunc) << "garbage";
        const PreparedDataset third = cmd_preprocess(d);
        REQUIRE(third.summary.failures.size() == 1);
        CHECK(third.summary.failures[0].image_path == victim);
        CHECK(third.summary.processed == 0);
        CHECK(third.summary.cached == 47);
        // The failed image's partner is left unpaired and dropped with it.
        CHECK(third.manifest.samples.size() == 46);
        CHECK(third.manifest.pairing.size() == 23);
    }

    SUBCASE("alignment without landmarks lists the images") {
        DatasetManifest m = first.manifest;
        m.samples[2].landmarks.reset();
        try {
            preprocess_dataset(m, d.preprocess, 3, dir.path() / "cache");
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::not_found);
            CHECK(std::string(e.what()).find(m.samples[2].image_path) != std::string::npos);
        }
        PreprocessFlags off = d.preprocess;
        off.align = false;
        CHECK(preprocess_dataset(m, off, 3, dir.path() / "cache").failures.empty());
    }
}

TEST_CASE("full tiny pipeline") {
    testing::TempDir dir("pipeline");
    const RunDescriptor d = tiny::descriptor(dir.path() / "data", dir.path() / "runs");

    CHECK(testing::error_code_of([&] {
              cmd_synth(tiny::corpus(), d.dataset_root);
              cmd_evaluate(d);
          }) == ErrorCode::not_found);

    const std::string table = tiny::run_all(d);
    CHECK(table.find("1/subject") != std::string::npos);
    CHECK(table.find("all/subject") != std::string::npos);
    CHECK(table.find("upconv + DoG (aligned)") != std::string::npos);

    const RunLayout layout(d);
    const auto results = parse_report_json(tiny::read_bytes(layout.reports() / "report.json"));
    REQUIRE(results.size() == 3);
    for (const auto& r : results) {
        CHECK(r.descriptor_hash == d.hash());
        CHECK(r.runs.size() == 2);
        CHECK(r.run_descriptors.size() == 2);
        for (std::size_t k = 0; k < r.mean.size(); ++k)
            CHECK(std::abs(r.mean[k] - 0.5 * (r.runs[0][k] + r.runs[1][k])) < 1e-12);
        CHECK(r.mean.back() == 1.0);
    }
    CHECK(fs::exists(layout.reports() / "report.txt"));
    CHECK(fs::exists(layout.reports() / "report.csv"));
    CHECK(fs::exists(layout.checkpoints() / "run_01" / "best.tvws"));
    CHECK(fs::exists(layout.checkpoints() / "run_02" / "best.tvws"));
    CHECK(testing::error_code_of([&] { cmd_report({dir.path() / "nowhere"}, dir.path() / "r"); }) ==
          ErrorCode::not_found);
}

TEST_CASE("command line") {
    testing::TempDir dir("cli");
    const std::string data = (dir.path() / "data").string();

    auto r = cli("synth --out " + data + " --subjects 6 --images 4 --size 64 --seed 11", dir.path());
    CHECK(r.exit_code == 0);
    const auto summary = last_json_line(r.out);
    CHECK(summary["images"] == 48);
    CHECK(summary["subjects"] == 6);

    r = cli("synth --out " + (dir.path() / "x").string() + " --subjects 0", dir.path());
    CHECK(r.exit_code == 2);
    const auto err = last_json_line(r.err);
    CHECK(err["command"] == "synth");
    CHECK(err["error"] == "invalid_argument");

    r = cli("bogus", dir.path());
    CHECK(r.exit_code == 2);
    CHECK(last_json_line(r.err)["error"] == "usage_error");

    r = cli("train --descriptor " + (dir.path() / "missing.json").string(), dir.path());
    CHECK(r.exit_code == 1);
    CHECK(last_json_line(r.err)["error"] == "not_found");

    r = cli("train --set bogus=1", dir.path());
    CHECK(r.exit_code == 2);
    CHECK(last_json_line(r.err)["error"] == "config_error");

    const std::string common = "--root " + data + " --out " + (dir.path() / "runs").string() +
                               " --seed 5 --set preprocess.size=16 --set preprocess.degrade_size=8"
                               " --set model.input_size=16 --set model.encoder_channels=[4,8]"
                               " --set model.bottleneck_channels=8 --set train.max_epochs=2"
                               " --set train.batch_size=4 --set n_runs=1 --set split.n_train_subjects=3";
    r = cli("evaluate " + common, dir.path());
    CHECK(r.exit_code == 1);
    CHECK(last_json_line(r.err)["error"] == "not_found");

    r = cli("preprocess " + common, dir.path());
    CHECK(r.exit_code == 0);
    CHECK(last_json_line(r.out)["cached"] == 48);  // filled by the failed evaluate above
    r = cli("train " + common, dir.path());
    CHECK(r.exit_code == 0);
    CHECK(last_json_line(r.out)["runs"].size() == 1);
    r = cli("evaluate " + common, dir.path());
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("all/subject") != std::string::npos);
    r = cli("report " + common, dir.path());
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("Rank-1") != std::string::npos);
}
