#include <cmath>

#include "brute_force.hpp"
#include "doctest.h"
#include "helpers.hpp"
#include "thermovis/evaluation/matching.hpp"
#include "thermovis/evaluation/metrics.hpp"
#include "thermovis/evaluation/report.hpp"

using namespace thermovis;

namespace {

std::vector<Match> ranking(std::initializer_list<const char*> subjects) {
    std::vector<Match> v;
    double score = 1.0;
    for (const char* s : subjects) {
        v.push_back({s, score});
        score -= 0.1;
    }
    return v;
}

ExperimentResult result(std::string variant, GalleryPolicy policy, std::vector<std::vector<double>> runs,
                        std::string dataset = "synthetic") {
    ExperimentResult r;
    r.dataset = std::move(dataset);
    r.variant = std::move(variant);
    r.policy = policy;
    r.config_fingerprint = "abc123";
    r.descriptor_hash = "d00d";
    r.runs = std::move(runs);
    finalize_result(r);
    return r;
}

std::size_t count_lines(const std::string& s) { return std::count(s.begin(), s.end(), '\n'); }

}  // namespace

TEST_CASE("unit_feature") {
    Image img(2, 1, 1);
    img.at(0, 0, 0) = 3.0f;
    img.at(0, 0, 1) = 4.0f;
    const auto f = unit_feature(img);
    CHECK(f[0] == doctest::Approx(0.6));
    CHECK(f[1] == doctest::Approx(0.8));
    CHECK(testing::error_code_of([] { unit_feature(Image(3, 3, 1)); }) == ErrorCode::invalid_argument);
    img.at(0, 0, 0) = std::nanf("");
    CHECK(testing::error_code_of([&] { unit_feature(img); }) == ErrorCode::non_finite);
}

TEST_CASE("match_probe basics") {
    Rng rng(1);
    std::vector<GalleryEntry> gallery;
    for (const char* s : {"b", "a", "c"}) gallery.push_back(make_gallery_entry(s, "", testing::random_image(rng, 6, 6)));

    const auto self = match_probe(gallery[1].synthesized, gallery);
    CHECK(self.front().subject_id == "a");
    CHECK(self.front().score == doctest::Approx(1.0).epsilon(1e-6));

    SUBCASE("orthogonal gallery") {
        std::vector<GalleryEntry> ortho;
        for (int i = 0; i < 3; ++i) {
            Image img(3, 1, 1);
            img.at(0, 0, i) = 1.0f;
            ortho.push_back(make_gallery_entry(std::string(1, static_cast<char>('x' + i)), "", img));
        }
        const auto r = match_probe(ortho[2].synthesized, ortho);
        REQUIRE(r.size() == 3);
        CHECK(r[0] == Match{"z", 1.0});
        CHECK(r[1] == Match{"x", 0.0});
        CHECK(r[2] == Match{"y", 0.0});
    }

    SUBCASE("per-subject maximum") {
        std::vector<GalleryEntry> g = gallery;
        g.push_back(make_gallery_entry("b", "", gallery[1].synthesized));
        const auto r = match_probe(gallery[1].synthesized, g);
        REQUIRE(r.size() == 3);
        CHECK(r[0].subject_id == "a");
        CHECK(r[1].subject_id == "b");
        CHECK(r[1].score == doctest::Approx(r[0].score));
    }

    SUBCASE("scale invariance") {
        const Image probe = testing::random_image(rng, 6, 6);
        Image half = probe;
        for (float& v : half.data()) v *= 0.5f;
        const auto a = match_probe(probe, gallery), b = match_probe(half, gallery);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].subject_id == b[i].subject_id);
            CHECK(a[i].score == doctest::Approx(b[i].score).epsilon(1e-6));
        }
    }

    CHECK(testing::error_code_of([&] { match_probe(gallery[0].synthesized, {}); }) == ErrorCode::invalid_argument);
    CHECK(testing::error_code_of([&] { match_probe(testing::random_image(rng, 5, 5), gallery); }) ==
          ErrorCode::shape_mismatch);
    CHECK(match_probes({gallery[0].synthesized, gallery[2].synthesized}, gallery, 2) ==
          std::vector<std::vector<Match>>{match_probe(gallery[0].synthesized, gallery),
                                          match_probe(gallery[2].synthesized, gallery)});
}

TEST_CASE("matching and rank-k agree with the brute-force oracle") {
    const brute_force::Tally t = brute_force::exhaustive(2);
    CHECK(t.galleries == 3 + 9 + 27 + 81 + 243);
    CHECK(t.ranking_mismatches == 0);
    CHECK(t.rank_k_mismatches == 0);

    const brute_force::CmcTally c = brute_force::random_cmc(3, 1000);
    CHECK(c.non_monotone == 0);
    CHECK(c.bad_terminal == 0);
    CHECK(c.rank1_mismatches == 0);
}

TEST_CASE("rank_k_accuracy") {
    const std::vector<std::vector<Match>> r = {ranking({"a", "b", "c"}), ranking({"b", "c", "a"})};
    const std::vector<std::string> truth = {"a", "a"};
    CHECK(rank_k_accuracy(r, truth, 1) == 0.5);
    CHECK(rank_k_accuracy(r, truth, 2) == 0.5);
    CHECK(rank_k_accuracy(r, truth, 3) == 1.0);

    CHECK(testing::error_code_of([&] { rank_k_accuracy(r, truth, 0); }) == ErrorCode::invalid_argument);
    CHECK(testing::error_code_of([&] { rank_k_accuracy(r, truth, 4); }) == ErrorCode::invalid_argument);
    CHECK(testing::error_code_of([&] { rank_k_accuracy(r, {"a"}, 1); }) == ErrorCode::invalid_argument);
    CHECK(testing::error_code_of([&] { rank_k_accuracy({}, {}, 1); }) == ErrorCode::invalid_argument);

    SUBCASE("self-matching gallery") {
        Rng rng(4);
        std::vector<GalleryEntry> gallery;
        std::vector<Image> probes;
        std::vector<std::string> ids;
        for (int s = 0; s < 12; ++s) {
            probes.push_back(testing::random_image(rng, 8, 8));
            ids.push_back("s" + std::to_string(s));
            gallery.push_back(make_gallery_entry(ids.back(), "", probes.back()));
        }
        CHECK(rank_k_accuracy(match_probes(probes, gallery), ids, 1) == 1.0);
    }

    SUBCASE("random rankings hit 1/S") {
        constexpr int subjects = 10, probes = 20000;
        Rng rng(5);
        std::vector<std::string> ids;
        for (int s = 0; s < subjects; ++s) ids.push_back("s" + std::to_string(s));
        std::vector<std::vector<Match>> rankings;
        std::vector<std::string> truths;
        for (int p = 0; p < probes; ++p) {
            std::vector<std::string> order = ids;
            rng.shuffle(order);
            std::vector<Match> m;
            for (const auto& s : order) m.push_back({s, 0.0});
            rankings.push_back(std::move(m));
            truths.push_back(ids[rng.below(subjects)]);
        }
        const double p = 1.0 / subjects;
        const double sigma = std::sqrt(p * (1 - p) / probes);
        CHECK(std::abs(rank_k_accuracy(rankings, truths, 1) - p) < 3 * sigma);
        CHECK(std::abs(rank_k_accuracy(rankings, truths, 5) - 5 * p) < 3 * std::sqrt(0.25 / probes));
    }
}

TEST_CASE("cmc_curve") {
    CHECK(cmc_curve({ranking({"b", "a", "c"})}, {"a"}) == std::vector<double>{0, 1, 1});
    CHECK(cmc_curve({ranking({"a", "b"}), ranking({"b", "a"})}, {"a", "b"}) == std::vector<double>{1, 1});
    const std::vector<std::vector<Match>> r = {ranking({"a", "b", "c", "d"}), ranking({"d", "c", "b", "a"}),
                                               ranking({"c", "a", "d", "b"})};
    const std::vector<std::string> truth = {"b", "a", "d"};
    const auto cmc = cmc_curve(r, truth);
    REQUIRE(cmc.size() == 4);
    for (int k = 1; k <= 4; ++k) CHECK(cmc[k - 1] == rank_k_accuracy(r, truth, k));
    CHECK(cmc.back() == 1.0);
}

TEST_CASE("synthesize_gallery") {
    ModelConfig cfg;
    cfg.encoder_channels = {4, 8};
    cfg.bottleneck_channels = 8;
    cfg.input_size = 16;
    const Model model(cfg, 6);
    Rng rng(7);
    std::vector<Sample> samples;
    std::vector<Image> visible;
    for (int s = 0; s < 21; ++s) {
        Sample smp;
        smp.subject_id = "s" + std::to_string(s);
        smp.image_path = smp.subject_id + "/v.png";
        samples.push_back(smp);
        visible.push_back(testing::random_image(rng, 16, 16, 3));
    }
    const auto a = synthesize_gallery(model, samples, visible);
    REQUIRE(a.size() == 21);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].subject_id == samples[i].subject_id);
        CHECK(a[i].source_path == samples[i].image_path);
        CHECK(a[i].synthesized.channels() == 1);
        double norm = 0;
        for (float v : a[i].feature) norm += static_cast<double>(v) * v;
        CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-6));
    }
    const auto b = synthesize_gallery(model, samples, visible, 3);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].feature == b[i].feature);

    try {
        synthesize_gallery(model, {}, {});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::invalid_argument);
        CHECK(std::string(e.what()).find("empty gallery") != std::string::npos);
    }
}

TEST_CASE("reference rows") {
    const auto& carl = reference_rows("carl");
    REQUIRE(carl.size() == 8);
    CHECK(carl.back().label == "upconv + DoG (aligned)");
    CHECK(carl.back().percent == std::array<double, 3>{48.0, 60.25, 85.0});
    CHECK(reference_rows("undx1").back().percent == std::array<double, 3>{58.75, 65.25, 87.2});
    CHECK(reference_rows("eurecom").back().percent == std::array<double, 3>{57.91, 70.0, 88.33});
    CHECK(reference_rows("synthetic").empty());
}

TEST_CASE("emit_report") {
    const std::vector<ExperimentResult> one_row = {
        result("upconv + DoG", GalleryPolicy::one_per_subject, {{0.25, 0.5, 1.0}, {0.5, 0.75, 1.0}}),
        result("upconv + DoG", GalleryPolicy::two_per_subject, {{0.5, 1.0, 1.0}, {0.75, 1.0, 1.0}}),
        result("upconv + DoG", GalleryPolicy::all_per_subject, {{1.0, 1.0, 1.0}, {0.5, 1.0, 1.0}})};

    CHECK(one_row[0].mean == std::vector<double>{0.375, 0.625, 1.0});

    const std::string text = emit_report(one_row, ReportFormat::text);
    CHECK(text.find("1/subject") != std::string::npos);
    CHECK(text.find("2/subject") != std::string::npos);
    CHECK(text.find("all/subject") != std::string::npos);
    CHECK(text.find("37.50%") != std::string::npos);
    CHECK(text.find("62.50%") != std::string::npos);
    CHECK(text.find("75.00%") != std::string::npos);
    CHECK(text.find("Published") == std::string::npos);

    const std::string csv = emit_report(one_row, ReportFormat::csv);
    CHECK(count_lines(csv) == 1 + 3 * 3);

    const std::string json = emit_report(one_row, ReportFormat::json);
    CHECK(parse_report_json(json) == one_row);
    CHECK(emit_report(parse_report_json(json), ReportFormat::json) == json);

    SUBCASE("Carl tables carry the published rows") {
        std::vector<ExperimentResult> carl = one_row;
        for (auto& r : carl) r.dataset = "carl";
        const std::string t = emit_report(carl, ReportFormat::text);
        CHECK(t.find("upconv + DoG (aligned)") != std::string::npos);
        CHECK(t.find("48.00%") != std::string::npos);
        CHECK(t.find("60.25%") != std::string::npos);
        CHECK(t.find("85.00%") != std::string::npos);
    }

    SUBCASE("mean is the element-wise average") {
        Rng rng(8);
        std::vector<std::vector<double>> runs(10, std::vector<double>(5));
        for (auto& run : runs)
            for (auto& v : run) v = rng.uniform();
        const ExperimentResult r = result("x", GalleryPolicy::all_per_subject, runs);
        for (std::size_t k = 0; k < 5; ++k) {
            double acc = 0;
            for (const auto& run : runs) acc += run[k];
            CHECK(std::abs(r.mean[k] - acc / 10) < 1e-12);
        }
    }

    std::vector<ExperimentResult> mixed = one_row;
    mixed[1].dataset = "carl";
    CHECK(testing::error_code_of([&] { emit_report(mixed, ReportFormat::text); }) == ErrorCode::invalid_argument);
    std::vector<ExperimentResult> dup = one_row;
    dup[1].policy = GalleryPolicy::one_per_subject;
    CHECK(testing::error_code_of([&] { emit_report(dup, ReportFormat::csv); }) == ErrorCode::invalid_argument);
    CHECK(testing::error_code_of([&] { emit_report({}, ReportFormat::json); }) == ErrorCode::invalid_argument);
    CHECK(testing::error_code_of([] { parse_report_json("{not json"); }) == ErrorCode::parse_error);
    CHECK(testing::error_code_of([] { parse_report_json("{}"); }) == ErrorCode::parse_error);
    ExperimentResult empty;
    CHECK(testing::error_code_of([&] { finalize_result(empty); }) == ErrorCode::invalid_argument);
}
