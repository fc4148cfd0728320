#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>

#include "teamopt/data.hpp"

using namespace teamopt;
namespace fs = std::filesystem;

namespace {

fs::path scratch_file(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "teamopt_tests";
    fs::create_directories(dir);
    return dir / name;
}

fs::path write_file(const std::string& name, const std::string& body) {
    const fs::path p = scratch_file(name);
    std::ofstream(p) << body;
    return p;
}

std::string error_of(const fs::path& p) {
    try {
        load_csv(p);
    } catch (const DataError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("scenario1") {
    const Dataset d = gen_scenario1(10000, 1);
    CHECK(d.size() == 10000);
    CHECK(d.n_features() == 2);
    CHECK(d.positive_fraction() >= 0.41);
    CHECK(d.positive_fraction() <= 0.45);
    CHECK(gen_scenario1(10000, 1) == d);
    CHECK_FALSE(gen_scenario1(10000, 2) == d);
    CHECK_THROWS_AS(gen_scenario1(99, 1), std::invalid_argument);

    const auto layout = scenario1_layout(10000);
    std::size_t total = 0;
    for (const BlobSpec& b : layout) total += b.count;
    CHECK(total == 10000);
}

TEST_CASE("moons") {
    const Dataset d = gen_moons(10000, kDefaultMoonsNoise, 3);
    CHECK(d.size() == 10000);
    CHECK(d.positive_fraction() == 0.5);
    CHECK(gen_moons(10000, kDefaultMoonsNoise, 3) == d);
    CHECK_THROWS_AS(gen_moons(101, 0.2, 1), std::invalid_argument);
    CHECK_THROWS_AS(gen_moons(98, 0.2, 1), std::invalid_argument);

    // Noise-free points lie exactly on their arcs.
    const Dataset clean = gen_moons(200, 0.0, 3);
    for (std::size_t i = 0; i < clean.size(); ++i) {
        const double x = clean.feature(i, 0), y = clean.feature(i, 1);
        if (clean.label(i) == 0) {
            CHECK(x * x + y * y == doctest::Approx(1.0));
            CHECK(y >= -1e-12);
        } else {
            CHECK((1 - x) * (1 - x) + (0.5 - y) * (0.5 - y) == doctest::Approx(1.0));
            CHECK(y <= 0.5 + 1e-12);
        }
    }
}

TEST_CASE("dataset validation") {
    Dataset d(2);
    const std::array<double, 2> ok{1.0, 2.0};
    const std::array<double, 3> wide{1.0, 2.0, 3.0};
    const std::array<double, 2> bad{1.0, INFINITY};
    CHECK_THROWS_AS(d.add(wide, 0), std::invalid_argument);
    CHECK_THROWS_AS(d.add(ok, 2), std::invalid_argument);
    CHECK_THROWS_AS(d.add(bad, 1), std::invalid_argument);
    d.add(ok, 1);
    CHECK(d.size() == 1);
}

TEST_CASE("csv round trip") {
    const Dataset d = gen_moons(200, 0.2, 9);
    const fs::path p = scratch_file("moons.csv");
    save_csv(d, p);
    const Dataset back = load_csv(p);
    REQUIRE(back.size() == d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(back.label(i) == d.label(i));
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(std::abs(back.feature(i, j) - d.feature(i, j)) <= 1e-12);
    }
}

TEST_CASE("csv loading") {
    const Dataset three = load_csv(write_file("ok.csv", "a,label,b\n1,0,2\n3,1,4.5\n-1,1,0\n"));
    CHECK(three.size() == 3);
    CHECK(three.n_features() == 2);
    CHECK(three.feature(1, 1) == 4.5);
    CHECK(three.label(1) == 1);
    CHECK(three.feature_names() == std::vector<std::string>{"a", "b"});

    const Dataset custom = load_csv(write_file("target.csv", "x,y\n1,0\n2,1\n"), "y");
    CHECK(custom.size() == 2);

    CHECK(error_of(write_file("two.csv", "a,label\n1,0\n2,2\n")).find("row 3") != std::string::npos);
    const std::string text = error_of(write_file("text.csv", "a,label\n1,0\nfoo,1\n"));
    CHECK(text.find("row 3") != std::string::npos);
    CHECK(text.find("'a'") != std::string::npos);
    CHECK(error_of(write_file("nolabel.csv", "a,b\n1,0\n")).find("label") != std::string::npos);
    CHECK(error_of(write_file("short.csv", "a,label\n1\n")).find("row 2") != std::string::npos);
    CHECK_THROWS_AS(load_csv(scratch_file("does_not_exist.csv")), DataError);
}

TEST_CASE("split") {
    Dataset d(1);
    for (int i = 0; i < 1000; ++i) {
        const std::array<double, 1> x{double(i)};
        d.add(x, i % 2);
    }
    const std::array<double, 2> frac{0.8, 0.2};
    const auto parts = split(d, frac, 4);
    CHECK(parts[0].size() == 800);
    CHECK(parts[1].size() == 200);
    std::set<double> seen;
    for (const auto& p : parts)
        for (std::size_t i = 0; i < p.size(); ++i) seen.insert(p.feature(i, 0));
    CHECK(seen.size() == 1000);
    CHECK(split(d, frac, 4)[1] == parts[1]);

    const std::array<double, 2> bad{0.5, 0.6};
    CHECK_THROWS_AS(split(d, bad, 1), std::invalid_argument);
    Dataset tiny(1);
    const std::array<double, 1> x{0.0};
    tiny.add(x, 0);
    tiny.add(x, 1);
    const std::array<double, 2> lopsided{0.9, 0.1};
    CHECK_THROWS_AS(split(tiny, lopsided, 1), std::invalid_argument);
}

TEST_CASE("standardize") {
    Dataset train(3), test(3);
    for (int i = 0; i < 500; ++i) {
        const std::array<double, 3> x{i * 0.37 - 20.0, std::sin(i) * 5.0 + 3.0, 7.0};
        train.add(x, i % 2);
    }
    const std::array<double, 3> probe{1.0, 2.0, 7.0};
    test.add(probe, 1);
    const std::array<Dataset, 1> others{test};
    const auto out = standardize(train, others);
    const Dataset& s = out[0];
    for (std::size_t j = 0; j < 2; ++j) {
        double mean = 0.0, sq = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) mean += s.feature(i, j);
        mean /= s.size();
        for (std::size_t i = 0; i < s.size(); ++i) sq += (s.feature(i, j) - mean) * (s.feature(i, j) - mean);
        CHECK(std::abs(mean) < 1e-10);
        CHECK(std::abs(std::sqrt(sq / s.size()) - 1.0) < 1e-10);
    }
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(s.feature(i, 2) == 7.0);

    // The test split carries the training statistics, never its own.
    const Standardization stats = fit_standardization(train);
    REQUIRE(out[1].standardization().has_value());
    CHECK(*out[1].standardization() == stats);
    CHECK(*out[0].standardization() == stats);
    CHECK(out[1].feature(0, 0) == (1.0 - stats.mean[0]) / stats.stddev[0]);
    CHECK(out[1].feature(0, 2) == 7.0);
}

TEST_CASE("k-fold indices partition the data") {
    const auto folds = kfold_indices(103, 5, 7);
    REQUIRE(folds.size() == 5);
    std::vector<std::size_t> all;
    for (const auto& f : folds) {
        CHECK(f.size() >= 20);
        CHECK(f.size() <= 21);
        all.insert(all.end(), f.begin(), f.end());
    }
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> expect(103);
    std::iota(expect.begin(), expect.end(), std::size_t{0});
    CHECK(all == expect);
    CHECK(kfold_indices(103, 5, 7) == folds);
}
