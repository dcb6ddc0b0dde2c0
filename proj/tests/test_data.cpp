#include <algorithm>
#include <fstream>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "stubs.hpp"
#include "thermovis/data/manifest.hpp"
#include "thermovis/data/protocol.hpp"
#include "thermovis/data/synthetic.hpp"
#include "thermovis/imaging/io.hpp"

using namespace thermovis;
namespace fs = std::filesystem;

namespace {

std::set<std::string> subject_set(const DatasetManifest& m) {
    const auto s = m.subjects();
    return {s.begin(), s.end()};
}

std::size_t count_images(const fs::path& root) {
    std::size_t n = 0;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file() && e.path().extension() == ".png") ++n;
    return n;
}

}  // namespace

TEST_CASE("make_manifest pairs by subject and tag") {
    std::vector<Sample> samples = {
        {"b", Modality::thermal, "t1", "b/thermal/t1.png", {}},
        {"a", Modality::visible, "t1", "a/visible/t1.png", {}},
        {"a", Modality::thermal, "t1", "a/thermal/t1.png", {}},
        {"b", Modality::visible, "t1", "b/visible/t1.png", {}},
        {"b", Modality::visible, "t2", "b/visible/t2.png", {}},
    };
    std::vector<std::string> unpaired;
    const DatasetManifest m = make_manifest("x", "/r", samples, &unpaired);
    validate_manifest(m);
    CHECK(m.pairing.size() == 2);
    CHECK(m.samples.size() == 4);
    REQUIRE(unpaired.size() == 1);
    CHECK(unpaired[0] == "b/visible/t2.png");
    for (auto [v, t] : m.pairing) {
        CHECK(m.samples[v].modality == Modality::visible);
        CHECK(m.samples[t].modality == Modality::thermal);
        CHECK(m.samples[v].subject_id == m.samples[t].subject_id);
        CHECK(m.samples[v].variation_tag == m.samples[t].variation_tag);
    }

    samples.push_back({"a", Modality::visible, "t9", "a/visible/t1.png", {}});
    CHECK(testing::error_code_of([&] { make_manifest("x", "/r", samples); }) == ErrorCode::format_error);
}

TEST_CASE("manifest CSV round trip") {
    const DatasetManifest m = stubs::uniform("stub", 4, 3);
    const DatasetManifest back = manifest_from_csv(manifest_to_csv(m), m.name, m.root);
    CHECK(back.samples == m.samples);
    CHECK(back.pairing == m.pairing);
    CHECK(testing::error_code_of([] { manifest_from_csv("wrong,header\n", "x", "/"); }) == ErrorCode::parse_error);
}

TEST_CASE("load_manifest directory layouts") {
    testing::TempDir dir("layout");

    SUBCASE("Carl-sized tree") {
        for (int s = 0; s < 41; ++s)
            for (int i = 0; i < 60; ++i) {
                const auto base = dir.path() / stubs::subject_name(s);
                stubs::touch(base / "visible" / (stubs::tag_name(i) + ".png"));
                stubs::touch(base / "thermal" / (stubs::tag_name(i) + ".png"));
            }
        const LoadResult r = load_manifest(dir.path(), DatasetKind::carl);
        CHECK(r.manifest.samples.size() == 4920);
        CHECK(r.manifest.pairing.size() == 2460);
        CHECK(r.manifest.count(Modality::visible) == 2460);
        CHECK(r.manifest.subjects().size() == 41);
    }

    SUBCASE("EURECOM exclusions") {
        const std::vector<std::string> kept = {"neutral",   "smile",      "open_mouth", "strong_light",
                                               "left_light", "right_light", "pose_up",   "pose_down",
                                               "pose_left_15", "pose_right_15", "session2_neutral",
                                               "session2_smile"};
        std::vector<std::string> all = kept;
        for (const auto& t : eurecom_excluded_variations()) all.push_back(t);
        for (int s = 0; s < 50; ++s)
            for (const auto& tag : all)
                for (const char* mod : {"rgb", "thermal"}) stubs::touch(dir.path() / stubs::subject_name(s) / mod / (tag + ".jpg"));
        stubs::touch(dir.path() / "p000" / "nir" / "neutral.png");

        const LoadResult r = load_manifest(dir.path(), DatasetKind::eurecom);
        CHECK(r.manifest.samples.size() == 1200);
        CHECK(r.manifest.pairing.size() == 600);
        const LoadResult generic = load_manifest(dir.path(), DatasetKind::generic);
        CHECK(generic.manifest.pairing.size() == 50 * all.size());
    }

    SUBCASE("unpaired images are reported and skipped") {
        stubs::touch(dir.path() / "a" / "visible" / "x.png");
        stubs::touch(dir.path() / "a" / "thermal" / "x.png");
        stubs::touch(dir.path() / "a" / "visible" / "lonely.png");
        const LoadResult r = load_manifest(dir.path(), DatasetKind::generic);
        CHECK(r.manifest.pairing.size() == 1);
        REQUIRE(r.warnings.size() == 1);
        CHECK(r.warnings[0].find("lonely") != std::string::npos);
    }

    SUBCASE("missing landmarks are listed") {
        stubs::touch(dir.path() / "a" / "visible" / "x.png");
        stubs::touch(dir.path() / "a" / "thermal" / "x.png");
        LoadOptions opt;
        opt.require_landmarks = true;
        try {
            load_manifest(dir.path(), DatasetKind::generic, opt);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("a/thermal/x.png") != std::string::npos);
            CHECK(std::string(e.what()).find("a/visible/x.png") != std::string::npos);
        }
    }

    SUBCASE("empty directory") {
        try {
            load_manifest(dir.path(), DatasetKind::generic);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("no samples found") != std::string::npos);
        }
    }
}

TEST_CASE("split_subjects") {
    const DatasetManifest carl = stubs::uniform("carl", 41, 60);
    const auto [train, test] = split_subjects(carl, {20, 3});
    CHECK(train.subjects().size() == 20);
    CHECK(test.subjects().size() == 21);
    CHECK(train.pairing.size() + test.pairing.size() == carl.pairing.size());

    const DatasetManifest eurecom = stubs::uniform("eurecom", 50, 12);
    const auto [etrain, etest] = split_subjects(eurecom, {30, 3});
    CHECK(etrain.subjects().size() == 30);
    CHECK(etest.subjects().size() == 20);

    const auto again = split_subjects(carl, {20, 3});
    CHECK(again.first.samples == train.samples);
    CHECK(again.second.samples == test.samples);

    CHECK(testing::error_code_of([&] { split_subjects(carl, {0, 1}); }) == ErrorCode::invalid_argument);
    CHECK(testing::error_code_of([&] { split_subjects(carl, {41, 1}); }) == ErrorCode::invalid_argument);
}

TEST_CASE("split disjointness holds for every seed") {
    const DatasetManifest m = stubs::manifest("m", stubs::spread(17, 80));
    std::set<std::vector<std::string>> distinct;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto [train, test] = split_subjects(m, {9, seed});
        const auto a = subject_set(train), b = subject_set(test);
        std::vector<std::string> both;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
        CHECK(both.empty());
        CHECK(a.size() + b.size() == 17);
        CHECK(train.samples.size() + test.samples.size() == m.samples.size());
        validate_manifest(train);
        validate_manifest(test);
        distinct.insert(train.subjects());
    }
    CHECK(distinct.size() > 150);
}

TEST_CASE("hold_out_validation spreads across subjects") {
    const DatasetManifest m = stubs::uniform("m", 30, 6);
    const auto [train, val] = hold_out_validation(m, 0.1, 5);
    CHECK(val.pairing.size() == 18);
    CHECK(train.pairing.size() == 162);
    CHECK(val.subjects().size() == 18);
    const auto again = hold_out_validation(m, 0.1, 5);
    CHECK(again.second.samples == val.samples);
}

TEST_CASE("gallery and probe cardinalities") {
    struct Case {
        std::vector<int> counts;
        std::size_t one, two, all, probes;
    };
    const Case cases[] = {
        {std::vector<int>(21, 60), 21, 42, 1260, 1260},
        {stubs::spread(41, 1146), 41, 82, 1146, 1146},
        {std::vector<int>(20, 12), 20, 40, 240, 240},
    };
    for (const auto& c : cases) {
        const DatasetManifest test = stubs::manifest("t", c.counts);
        for (std::uint64_t seed : {0ULL, 1ULL, 99ULL}) {
            CHECK(build_gallery(test, GalleryPolicy::one_per_subject, seed).size() == c.one);
            CHECK(build_gallery(test, GalleryPolicy::two_per_subject, seed).size() == c.two);
            CHECK(build_gallery(test, GalleryPolicy::all_per_subject, seed).size() == c.all);
        }
        CHECK(build_probes(test).size() == c.probes);
    }
}

TEST_CASE("gallery selection") {
    const DatasetManifest test = stubs::uniform("t", 5, 6);
    const auto g1 = build_gallery(test, GalleryPolicy::two_per_subject, 4);
    CHECK(g1 == build_gallery(test, GalleryPolicy::two_per_subject, 4));
    std::map<std::string, int> per;
    for (const auto& s : g1) {
        CHECK(s.modality == Modality::visible);
        ++per[s.subject_id];
    }
    for (const auto& [subject, n] : per) CHECK(n == 2);
    bool differs = false;
    for (std::uint64_t seed = 5; seed < 20 && !differs; ++seed)
        differs = build_gallery(test, GalleryPolicy::two_per_subject, seed) != g1;
    CHECK(differs);

    const DatasetManifest thin = stubs::manifest("thin", {3, 1, 2});
    try {
        build_gallery(thin, GalleryPolicy::two_per_subject, 0);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find(stubs::subject_name(1)) != std::string::npos);
    }
    const auto probes = build_probes(stubs::manifest("one", {3}));
    CHECK(probes.size() == 3);
    for (const auto& p : probes) CHECK(p.modality == Modality::thermal);
}

TEST_CASE("split descriptor JSON round trip") {
    SplitDescriptor d{"carl", 42, 20, {GalleryPolicy::one_per_subject, GalleryPolicy::all_per_subject},
                      {"a", "b"}, {"c"}};
    CHECK(split_descriptor_from_json(to_json(d)) == d);
    CHECK(testing::error_code_of([] { split_descriptor_from_json(nlohmann::json::object()); }) ==
          ErrorCode::parse_error);
}

TEST_CASE("generate_synthetic") {
    testing::TempDir dir("synth");
    SyntheticConfig cfg;
    cfg.n_subjects = 3;
    cfg.images_per_subject = 2;
    cfg.size = 64;
    const DatasetManifest m = generate_synthetic(cfg, dir.path() / "a");
    CHECK(m.pairing.size() == 6);
    CHECK(count_images(dir.path() / "a") == 12);
    for (const auto& s : m.samples) CHECK(s.landmarks.has_value());

    generate_synthetic(cfg, dir.path() / "b");
    for (const auto& s : m.samples) {
        CHECK(load_image(dir.path() / "a" / s.image_path) == load_image(dir.path() / "b" / s.image_path));
    }
    const LoadResult loaded = load_manifest(dir.path() / "a", DatasetKind::generic);
    CHECK(loaded.manifest.pairing.size() == 6);
    for (const auto& s : loaded.manifest.samples) CHECK(s.landmarks.has_value());

    cfg.n_subjects = 0;
    CHECK(testing::error_code_of([&] { generate_synthetic(cfg, dir.path() / "c"); }) == ErrorCode::invalid_argument);
}

TEST_CASE("synthetic identities are separable") {
    // Mean pixel distance between images of different subjects exceeds that
    // between images of the same subject, in both modalities.
    SyntheticConfig cfg;
    cfg.size = 96;
    const int subjects = 6, images = 4;
    std::vector<std::vector<SyntheticPair>> pairs(subjects);
    for (int s = 0; s < subjects; ++s)
        for (int i = 0; i < images; ++i) pairs[s].push_back(render_synthetic_pair(cfg, s, i));
    for (bool thermal : {false, true}) {
        double intra = 0, inter = 0;
        int n_intra = 0, n_inter = 0;
        for (int s = 0; s < subjects; ++s)
            for (int i = 0; i < images; ++i)
                for (int t = 0; t < subjects; ++t)
                    for (int j = 0; j < images; ++j) {
                        if (s == t && i >= j) continue;
                        const Image& a = thermal ? pairs[s][i].thermal : pairs[s][i].visible;
                        const Image& b = thermal ? pairs[t][j].thermal : pairs[t][j].visible;
                        double d = 0;
                        for (std::size_t k = 0; k < a.size(); ++k) d += std::pow(a.values()[k] - b.values()[k], 2);
                        (s == t ? intra : inter) += std::sqrt(d);
                        ++(s == t ? n_intra : n_inter);
                    }
        CHECK(inter / n_inter > intra / n_intra);
    }
}
