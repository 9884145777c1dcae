#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>
#include <tuple>

#include "llpauc/data.hpp"

using namespace llpauc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto d = fs::temp_directory_path() / "llpauc_data_test" / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string write_file(const fs::path& p, const std::string& body) {
    std::ofstream os(p);
    os << body;
    return p.string();
}

using Key = std::tuple<std::string, std::string, double>;

std::multiset<Key> keys(const InteractionTable& t) {
    std::multiset<Key> out;
    for (const auto& r : t.records)
        out.insert({t.user_ids[r.user], t.item_ids[r.item], r.rating.value_or(-1.0)});
    return out;
}

std::set<std::pair<std::size_t, std::size_t>> pairs(const InteractionTable& t) {
    std::set<std::pair<std::size_t, std::size_t>> out;
    for (const auto& r : t.records) out.insert({r.user, r.item});
    return out;
}

// Ten rating-5 records per user (items 0..9), plus four rating-1 records when `with_noise`.
InteractionTable rated_table(std::size_t users, bool with_noise) {
    InteractionTable t;
    for (std::size_t i = 0; i < 14; ++i) t.item_ids.push_back("i" + std::to_string(i));
    for (std::size_t u = 0; u < users; ++u) {
        t.user_ids.push_back("u" + std::to_string(u));
        for (std::size_t i = 0; i < 10; ++i) t.records.push_back({u, i, 5.0, std::nullopt});
        if (with_noise)
            for (std::size_t i = 10; i < 14; ++i) t.records.push_back({u, i, 1.0, std::nullopt});
    }
    return t;
}

}  // namespace

TEST_CASE("load deduplicates keeping the last occurrence") {
    const auto d = scratch("load");
    const auto p = write_file(d / "a.tsv", "user\titem\trating\nA\tx\t4\nB\ty\t2\nA\tx\t1\n");
    const auto t = load_interactions(p, TableFormat::tsv);
    REQUIRE(t.records.size() == 2);
    CHECK(t.n_users() == 2);
    CHECK(t.n_items() == 2);
    CHECK(t.user_ids[0] == "A");
    const auto it = std::find_if(t.records.begin(), t.records.end(), [](const Interaction& r) { return r.user == 0; });
    CHECK(*it->rating == 1.0);
    CHECK(t.has_rating());
}

TEST_CASE("files without a rating column and noise mode") {
    const auto d = scratch("norating");
    const auto p = write_file(d / "a.csv", "user,item\n1,2\n1,3\n1,4\n2,2\n2,3\n2,5\n");
    CHECK(format_for_path(p) == TableFormat::csv);
    const auto t = load_interactions(p, TableFormat::csv);
    CHECK(t.records.size() == 6);
    CHECK_FALSE(t.has_rating());
    for (const auto& r : t.records) CHECK_FALSE(r.rating.has_value());
    SplitSpec s;
    s.noise_mode = NoiseMode::noise;
    CHECK_THROWS(make_split(t, s));
    s.noise_mode = NoiseMode::clean;
    CHECK_NOTHROW(make_split(t, s));
}

TEST_CASE("malformed and empty files") {
    const auto d = scratch("bad");
    const auto p = write_file(d / "a.tsv", "user\titem\trating\nA\tx\t4\nB\n");
    try {
        load_interactions(p, TableFormat::tsv);
        FAIL("expected an error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("3") != std::string::npos);
    }
    const auto q = write_file(d / "b.tsv", "user\titem\trating\nA\tx\tfour\n");
    CHECK_THROWS_AS(load_interactions(q, TableFormat::tsv), std::runtime_error);
    const auto e = write_file(d / "c.tsv", "");
    CHECK_THROWS_AS(load_interactions(e, TableFormat::tsv), std::runtime_error);
    const auto h = write_file(d / "d.tsv", "user\titem\n");
    CHECK_THROWS_AS(load_interactions(h, TableFormat::tsv), std::runtime_error);
    CHECK_THROWS_AS(load_interactions((d / "missing.tsv").string(), TableFormat::tsv), std::runtime_error);
}

TEST_CASE("write/read round trip preserves the record multiset") {
    const auto d = scratch("rt");
    const auto t = synth_generate({30, 40, 4, 0.1, 0.2, 5}).table;
    for (auto fmt : {TableFormat::tsv, TableFormat::csv}) {
        const auto p = (d / (fmt == TableFormat::tsv ? "t.tsv" : "t.csv")).string();
        write_interactions(t, p, fmt);
        const auto r = load_interactions(p, fmt);
        CHECK(keys(r) == keys(t));
    }
}

TEST_CASE("split fractions are exact for a ten-record user") {
    const auto t = rated_table(1, false);
    SplitSpec s;
    const auto r = make_split(t, s);
    CHECK(r.train.records.size() == 8);
    CHECK(r.val.records.size() == 1);
    CHECK(r.test.records.size() == 1);
    CHECK(r.users_kept == 1);
}

TEST_CASE("split spec validation and user minimum") {
    SplitSpec s;
    s.train_frac = 0.7;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.train_frac = 0.8;
    s.val_frac = 0.0;
    s.test_frac = 0.2;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);

    InteractionTable t = rated_table(2, false);
    t.user_ids.push_back("few");
    t.records.push_back({2, 0, 5.0, std::nullopt});
    t.records.push_back({2, 1, 5.0, std::nullopt});
    const auto r = make_split(t, SplitSpec{});
    CHECK(r.users_kept == 2);
    CHECK(r.users_dropped == 1);
    for (const auto* part : {&r.train, &r.val, &r.test})
        for (const auto& rec : part->records) CHECK(rec.user != 2);
}

TEST_CASE("property: splits partition each user's clean records") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto t = synth_generate({40, 60, 4, 0.15, 0.0, seed}).table;
        SplitSpec s;
        s.seed = seed;
        const auto r = make_split(t, s);
        const auto tr = pairs(r.train), va = pairs(r.val), te = pairs(r.test);
        CHECK(tr.size() == r.train.records.size());
        std::set<std::pair<std::size_t, std::size_t>> uni;
        for (const auto* p : {&tr, &va, &te}) uni.insert(p->begin(), p->end());
        CHECK(uni.size() == tr.size() + va.size() + te.size());

        std::set<std::pair<std::size_t, std::size_t>> kept;
        std::vector<std::size_t> per_user(t.n_users(), 0);
        for (const auto& rec : t.records) ++per_user[rec.user];
        for (const auto& rec : t.records)
            if (per_user[rec.user] >= s.min_user_interactions) kept.insert({rec.user, rec.item});
        CHECK(uni == kept);
    }
}

TEST_CASE("clean and noise modes share the test set") {
    const auto t = rated_table(25, true);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        SplitSpec c;
        c.seed = seed;
        SplitSpec n = c;
        n.noise_mode = NoiseMode::noise;
        const auto rc = make_split(t, c), rn = make_split(t, n);
        CHECK(pairs(rc.test) == pairs(rn.test));
        CHECK(rc.noisy_train == 0);
        for (const auto* p : {&rc.train, &rc.val, &rc.test})
            for (const auto& rec : p->records) CHECK(*rec.rating >= 3.0);
        CHECK(rn.noisy_train + rn.noisy_val == 25 * 4);
        for (const auto& rec : rn.test.records) CHECK(*rec.rating >= 3.0);
        // noisy records only grow train and val
        const auto ctr = pairs(rc.train), ntr = pairs(rn.train);
        CHECK(std::includes(ntr.begin(), ntr.end(), ctr.begin(), ctr.end()));
    }
}

TEST_CASE("noise cap limits the added records") {
    const auto t = rated_table(10, true);
    SplitSpec n;
    n.noise_mode = NoiseMode::noise;
    n.noise_cap = 0.2;  // 9 clean train+val records per user -> at most 1 noisy
    const auto r = make_split(t, n);
    CHECK(r.noisy_train + r.noisy_val <= 10 * 1);
    CHECK(r.noisy_train + r.noisy_val + r.noisy_discarded == 10 * 4);
}

TEST_CASE("split directory round trip") {
    const auto d = scratch("split");
    const auto t = synth_generate({30, 50, 4, 0.1, 0.2, 9}).table;
    SplitSpec s;
    s.noise_mode = NoiseMode::noise;
    s.seed = 4;
    const auto r = make_split(t, s);
    write_split(r, s, d.string());
    CHECK(fs::exists(d / "manifest.json"));
    const auto back = read_split(d.string());
    CHECK(keys(back.train) == keys(r.train));
    CHECK(keys(back.val) == keys(r.val));
    CHECK(keys(back.test) == keys(r.test));
    CHECK(back.train.user_ids == r.train.user_ids);
    CHECK(back.train.item_ids == r.train.item_ids);
}

TEST_CASE("synthetic data: size, determinism and validation") {
    const auto a = synth_generate({200, 300, 8, 0.05, 0.0, 3});
    const double n = static_cast<double>(a.table.records.size());
    CHECK(n >= 3000 * 0.95);
    CHECK(n <= 3000 * 1.05);
    CHECK(a.n_noisy == 0);
    // every positive lies above the latent cutoff
    for (const auto& r : a.table.records) {
        CHECK(*r.rating == kCleanRating);
        CHECK(a.latent_logit(r.user, r.item, 8) >= a.threshold);
    }
    const auto b = synth_generate({200, 300, 8, 0.05, 0.0, 3});
    CHECK(keys(a.table) == keys(b.table));
    const auto c = synth_generate({200, 300, 8, 0.05, 0.0, 4});
    CHECK(keys(a.table) != keys(c.table));

    CHECK_THROWS_AS(synth_generate({0, 300, 8, 0.05, 0.0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(synth_generate({200, 300, 0, 0.05, 0.0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(synth_generate({200, 300, 8, 1.0, 0.0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(synth_generate({200, 300, 8, 0.05, 1.0, 1}), std::invalid_argument);
}

TEST_CASE("property: flip rate sets the noisy fraction of positives") {
    for (double p : {0.1, 0.2, 0.4}) {
        const auto s = synth_generate({400, 500, 6, 0.05, p, 21});
        REQUIRE(s.n_clean + s.n_noisy == s.table.records.size());
        REQUIRE(s.n_noisy >= 1000);
        const double frac = static_cast<double>(s.n_noisy) / static_cast<double>(s.table.records.size());
        CHECK(std::abs(frac - p) <= 0.02);
        for (const auto& r : s.table.records)
            if (*r.rating == kNoisyRating) CHECK(s.latent_logit(r.user, r.item, 6) < s.threshold);
    }
}
