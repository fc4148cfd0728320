#include "teamopt/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

namespace teamopt {

Dataset::Dataset(std::size_t n_features, std::vector<std::string> feature_names)
    : n_features_(n_features), feature_names_(std::move(feature_names)) {
    if (feature_names_.empty()) {
        for (std::size_t j = 0; j < n_features_; ++j) feature_names_.push_back("x" + std::to_string(j));
    }
    if (feature_names_.size() != n_features_)
        throw std::invalid_argument("feature name count does not match feature count");
}

void Dataset::add(std::span<const double> x, Label y) {
    if (x.size() != n_features_)
        throw std::invalid_argument("row has " + std::to_string(x.size()) + " features, expected " +
                                    std::to_string(n_features_));
    if (y != 0 && y != 1) throw std::invalid_argument("label must be 0 or 1");
    for (double v : x)
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite feature value");
    features_.insert(features_.end(), x.begin(), x.end());
    labels_.push_back(y);
}

double Dataset::positive_fraction() const {
    if (labels_.empty()) return 0.0;
    const auto pos = std::count(labels_.begin(), labels_.end(), 1);
    return static_cast<double>(pos) / static_cast<double>(labels_.size());
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    Dataset out(n_features_, feature_names_);
    out.stats_ = stats_;
    out.reserve(indices.size());
    for (std::size_t i : indices) {
        const auto r = row(i);
        out.features_.insert(out.features_.end(), r.begin(), r.end());
        out.labels_.push_back(labels_[i]);
    }
    return out;
}

Dataset Dataset::select_features(std::span<const std::size_t> columns) const {
    std::vector<std::string> names;
    for (std::size_t c : columns) {
        if (c >= n_features_) throw std::invalid_argument("feature index out of range");
        names.push_back(feature_names_[c]);
    }
    Dataset out(columns.size(), std::move(names));
    if (stats_) {
        Standardization s;
        for (std::size_t c : columns) {
            s.mean.push_back(stats_->mean[c]);
            s.stddev.push_back(stats_->stddev[c]);
        }
        out.stats_ = std::move(s);
    }
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) {
        for (std::size_t c : columns) out.features_.push_back(feature(i, c));
        out.labels_.push_back(labels_[i]);
    }
    return out;
}

Dataset gen_blobs(std::span<const BlobSpec> blobs, std::uint64_t seed) {
    Dataset out(2);
    std::mt19937_64 rng(seed);
    for (const BlobSpec& b : blobs) {
        if (!(b.half_width > 0.0)) throw std::invalid_argument("blob half-width must be positive");
        if (b.count < 1) throw std::invalid_argument("blob count must be >= 1");
        std::uniform_real_distribution<double> offset(-b.half_width, b.half_width);
        for (std::size_t i = 0; i < b.count; ++i) {
            const double x0 = b.center[0] + offset(rng);
            const double x1 = b.center[1] + offset(rng);
            const std::array<double, 2> x{x0, x1};
            out.add(x, b.label);
        }
    }
    return out;
}

std::vector<BlobSpec> scenario1_layout(std::size_t n) {
    // Relative blob sizes. Majority blobs have weight 1, B has half of that,
    // and A is sized so positives make up 43% of the points:
    // (2 + w_A) / (5.5 + w_A) = 0.43.
    constexpr double kHalfWidth = 0.6;
    constexpr double kWeightA = (0.43 * 5.5 - 2.0) / (1.0 - 0.43);
    struct Entry {
        std::array<double, 2> center;
        Label label;
        double weight;
    };
    const std::array<Entry, 7> entries{{
        {{-2.0, -2.0}, 0, 1.0},
        {{-2.0, 2.0}, 0, 1.0},
        {{-2.0, 0.0}, 0, 1.0},
        {{2.0, -2.0}, 1, 1.0},
        {{2.0, 2.0}, 1, 1.0},
        {{0.4, 0.0}, 1, kWeightA},  // A
        {{2.0, 0.0}, 0, 0.5},       // B
    }};

    // Largest-remainder apportionment of n.
    const double total = std::accumulate(entries.begin(), entries.end(), 0.0,
                                         [](double s, const Entry& e) { return s + e.weight; });
    std::vector<std::size_t> counts(entries.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const double exact = static_cast<double>(n) * entries[i].weight / total;
        counts[i] = static_cast<std::size_t>(std::floor(exact));
        assigned += counts[i];
        remainders.emplace_back(exact - std::floor(exact), i);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++counts[remainders[k].second];

    std::vector<BlobSpec> layout;
    for (std::size_t i = 0; i < entries.size(); ++i)
        layout.push_back({entries[i].center, kHalfWidth, counts[i], entries[i].label});
    return layout;
}

Dataset gen_scenario1(std::size_t n, std::uint64_t seed) {
    if (n < 100) throw std::invalid_argument("scenario1 needs n >= 100");
    const auto layout = scenario1_layout(n);
    return gen_blobs(layout, seed);
}

Dataset gen_moons(std::size_t n, double noise_std, std::uint64_t seed) {
    if (n < 100 || n % 2 != 0) throw std::invalid_argument("moons needs an even n >= 100");
    if (!(noise_std >= 0.0)) throw std::invalid_argument("noise stddev must be >= 0");
    Dataset out(2);
    out.reserve(n);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
    std::normal_distribution<double> noise(0.0, 1.0);
    const std::size_t half = n / 2;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = angle(rng);
        const bool upper = i < half;
        std::array<double, 2> x = upper ? std::array<double, 2>{std::cos(t), std::sin(t)}
                                        : std::array<double, 2>{1.0 - std::cos(t), 0.5 - std::sin(t)};
        if (noise_std > 0.0) {
            x[0] += noise_std * noise(rng);
            x[1] += noise_std * noise(rng);
        }
        out.add(x, upper ? 0 : 1);
    }
    return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const std::string& label_column) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw DataError(path.string() + ": missing header row");
    std::vector<std::string> header = split_csv_line(line);
    for (auto& h : header) h = trim(h);
    if (!header.empty() && header[0].starts_with("\xEF\xBB\xBF")) header[0].erase(0, 3);

    const auto label_it = std::find(header.begin(), header.end(), label_column);
    if (label_it == header.end())
        throw DataError(path.string() + ": missing label column '" + label_column + "'");
    const std::size_t label_idx = static_cast<std::size_t>(label_it - header.begin());

    std::vector<std::string> names;
    for (std::size_t j = 0; j < header.size(); ++j)
        if (j != label_idx) names.push_back(header[j]);
    Dataset out(names.size(), names);

    std::vector<double> x(names.size());
    std::size_t row = 1;  // header is row 1
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw DataError(path.string() + ": row " + std::to_string(row) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(header.size()));
        Label y = 0;
        std::size_t k = 0;
        for (std::size_t j = 0; j < cells.size(); ++j) {
            const std::string cell = trim(cells[j]);
            double v = 0.0;
            const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size() ||
                !std::isfinite(v))
                throw DataError(path.string() + ": row " + std::to_string(row) + ", column '" +
                                header[j] + "': non-numeric value '" + cell + "'");
            if (j == label_idx) {
                if (v != 0.0 && v != 1.0)
                    throw DataError(path.string() + ": row " + std::to_string(row) +
                                    ", column '" + header[j] + "': label must be 0 or 1, got '" +
                                    cell + "'");
                y = v == 1.0 ? 1 : 0;
            } else {
                x[k++] = v;
            }
        }
        out.add(x, y);
    }
    return out;
}

void save_csv(const Dataset& data, const std::filesystem::path& path,
              const std::string& label_column) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    for (const auto& name : data.feature_names()) out << name << ',';
    out << label_column << '\n';
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (double v : data.row(i)) out << format_double(v) << ',';
        out << data.label(i) << '\n';
    }
    if (!out) throw DataError("failed writing " + path.string());
}

std::vector<Dataset> split(const Dataset& data, std::span<const double> fractions,
                           std::uint64_t seed) {
    if (fractions.empty()) throw std::invalid_argument("split needs at least one fraction");
    double sum = 0.0;
    for (double f : fractions) {
        if (!(f > 0.0)) throw std::invalid_argument("split fractions must be positive");
        sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("split fractions must sum to 1");

    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<Dataset> parts;
    double cumulative = 0.0;
    std::size_t begin = 0;
    for (std::size_t k = 0; k < fractions.size(); ++k) {
        cumulative += fractions[k];
        const std::size_t end = k + 1 == fractions.size()
                                    ? data.size()
                                    : static_cast<std::size_t>(std::llround(cumulative * static_cast<double>(data.size())));
        if (end <= begin) throw std::invalid_argument("split produced an empty part");
        parts.push_back(data.subset(std::span<const std::size_t>(order).subspan(begin, end - begin)));
        begin = end;
    }
    return parts;
}

Standardization fit_standardization(const Dataset& train) {
    if (train.empty()) throw std::invalid_argument("cannot standardize an empty dataset");
    const std::size_t n = train.size();
    const std::size_t d = train.n_features();
    Standardization s{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) s.mean[j] += train.feature(i, j);
    for (double& m : s.mean) m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            const double dev = train.feature(i, j) - s.mean[j];
            s.stddev[j] += dev * dev;
        }
    for (double& v : s.stddev) {
        v = std::sqrt(v / static_cast<double>(n));
        if (v < 1e-12) v = 0.0;
    }
    return s;
}

Dataset apply_standardization(const Dataset& data, const Standardization& stats) {
    if (stats.mean.size() != data.n_features())
        throw std::invalid_argument("standardization width does not match dataset");
    Dataset out(data.n_features(), data.feature_names());
    out.reserve(data.size());
    std::vector<double> x(data.n_features());
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double v = data.feature(i, j);
            x[j] = stats.stddev[j] > 0.0 ? (v - stats.mean[j]) / stats.stddev[j] : v;
        }
        out.add(x, data.label(i));
    }
    out.set_standardization(stats);
    return out;
}

std::vector<Dataset> standardize(const Dataset& train, std::span<const Dataset> others) {
    const Standardization stats = fit_standardization(train);
    std::vector<Dataset> out;
    out.push_back(apply_standardization(train, stats));
    for (const Dataset& d : others) out.push_back(apply_standardization(d, stats));
    return out;
}

std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, std::size_t k,
                                                    std::uint64_t seed) {
    if (k < 2 || n < k) throw std::invalid_argument("k-fold needs 2 <= k <= n");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::vector<std::size_t>> folds(k);
    for (std::size_t i = 0; i < n; ++i) folds[i % k].push_back(order[i]);
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

}  // namespace teamopt
