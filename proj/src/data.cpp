#include "llpauc/data.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "llpauc/random.hpp"

namespace llpauc {

namespace fs = std::filesystem;
using nlohmann::json;

bool InteractionTable::has_rating() const {
    return !records.empty() &&
           std::all_of(records.begin(), records.end(), [](const Interaction& r) { return r.rating.has_value(); });
}

InteractionTable InteractionTable::empty_like() const {
    InteractionTable t;
    t.user_ids = user_ids;
    t.item_ids = item_ids;
    return t;
}

TableFormat format_for_path(const std::string& path) {
    return fs::path(path).extension() == ".csv" ? TableFormat::csv : TableFormat::tsv;
}

namespace {

char delimiter(TableFormat f) { return f == TableFormat::csv ? ',' : '\t'; }

std::vector<std::string> split_fields(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, delim)) out.push_back(field);
    if (!line.empty() && line.back() == delim) out.emplace_back();
    return out;
}

[[noreturn]] void malformed(const std::string& path, std::size_t line_no, const std::string& why) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + why);
}

class IdMap {
public:
    IdMap() = default;
    explicit IdMap(const std::vector<std::string>& fixed) : ids_(fixed), frozen_(true) {
        for (std::size_t i = 0; i < ids_.size(); ++i) index_.emplace(ids_[i], i);
    }
    std::optional<std::size_t> get(const std::string& id) {
        if (auto it = index_.find(id); it != index_.end()) return it->second;
        if (frozen_) return std::nullopt;
        index_.emplace(id, ids_.size());
        ids_.push_back(id);
        return ids_.size() - 1;
    }
    std::vector<std::string> take() { return std::move(ids_); }

private:
    std::vector<std::string> ids_;
    std::unordered_map<std::string, std::size_t> index_;
    bool frozen_ = false;
};

InteractionTable load_impl(const std::string& path, TableFormat format, IdMap users, IdMap items) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open interactions file: " + path);
    const char delim = delimiter(format);

    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::vector<Interaction> raw;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> where;  // pair -> slot in raw

    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header_seen) {
            header_seen = true;
            if (line.rfind("user", 0) != 0) malformed(path, line_no, "expected header starting with 'user'");
            continue;
        }
        const auto f = split_fields(line, delim);
        if (f.size() < 2 || f.size() > 4 || f[0].empty() || f[1].empty())
            malformed(path, line_no, "expected user, item[, rating[, timestamp]]");
        Interaction rec;
        const auto u = users.get(f[0]);
        const auto i = items.get(f[1]);
        if (!u) malformed(path, line_no, "unknown user id '" + f[0] + "'");
        if (!i) malformed(path, line_no, "unknown item id '" + f[1] + "'");
        rec.user = *u;
        rec.item = *i;
        try {
            std::size_t used = 0;
            if (f.size() >= 3 && !f[2].empty()) {
                rec.rating = std::stod(f[2], &used);
                if (used != f[2].size()) throw std::invalid_argument("rating");
            }
            if (f.size() == 4 && !f[3].empty()) {
                rec.timestamp = std::stoll(f[3], &used);
                if (used != f[3].size()) throw std::invalid_argument("timestamp");
            }
        } catch (const std::exception&) {
            malformed(path, line_no, "non-numeric rating or timestamp");
        }
        const auto key = std::make_pair(rec.user, rec.item);
        if (auto it = where.find(key); it != where.end()) {
            raw[it->second] = rec;
        } else {
            where.emplace(key, raw.size());
            raw.push_back(rec);
        }
    }
    if (raw.empty()) throw std::runtime_error("interactions file has no records: " + path);

    InteractionTable t;
    t.records = std::move(raw);
    t.user_ids = users.take();
    t.item_ids = items.take();
    return t;
}

std::string format_number(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

InteractionTable load_interactions(const std::string& path, TableFormat format) {
    return load_impl(path, format, IdMap{}, IdMap{});
}

InteractionTable load_interactions(const std::string& path, TableFormat format,
                                   const std::vector<std::string>& user_ids,
                                   const std::vector<std::string>& item_ids) {
    auto t = load_impl(path, format, IdMap(user_ids), IdMap(item_ids));
    return t;
}

void write_interactions(const InteractionTable& t, const std::string& path, TableFormat format) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write interactions file: " + path);
    const char d = delimiter(format);
    const bool ratings = std::any_of(t.records.begin(), t.records.end(), [](auto& r) { return r.rating.has_value(); });
    const bool stamps = std::any_of(t.records.begin(), t.records.end(), [](auto& r) { return r.timestamp.has_value(); });
    os << "user" << d << "item";
    if (ratings || stamps) os << d << "rating";
    if (stamps) os << d << "timestamp";
    os << '\n';
    for (const auto& r : t.records) {
        os << t.user_ids[r.user] << d << t.item_ids[r.item];
        if (ratings || stamps) os << d << (r.rating ? format_number(*r.rating) : "");
        if (stamps) os << d << (r.timestamp ? std::to_string(*r.timestamp) : "");
        os << '\n';
    }
    if (!os) throw std::runtime_error("failed writing interactions file: " + path);
}

void SplitSpec::validate() const {
    if (!(train_frac > 0.0 && val_frac > 0.0 && test_frac > 0.0))
        throw std::invalid_argument("split fractions must be positive");
    if (std::abs(train_frac + val_frac + test_frac - 1.0) > 1e-9)
        throw std::invalid_argument("split fractions must sum to 1");
    if (min_user_interactions < 3)
        throw std::invalid_argument("min_user_interactions must be at least 3 (one record per split)");
    if (noise_cap && !(*noise_cap >= 0.0)) throw std::invalid_argument("noise cap must be non-negative");
}

SplitResult make_split(const InteractionTable& table, const SplitSpec& spec) {
    spec.validate();
    const bool rated = table.has_rating();
    if (spec.noise_mode == NoiseMode::noise && !rated)
        throw std::invalid_argument("noise mode needs a rating for every record");

    std::vector<std::vector<std::size_t>> clean(table.n_users()), noisy(table.n_users());
    for (std::size_t r = 0; r < table.records.size(); ++r) {
        const auto& rec = table.records[r];
        const bool is_noisy = rated && *rec.rating < spec.noise_rating_threshold;
        (is_noisy ? noisy : clean)[rec.user].push_back(r);
    }

    SplitResult out;
    out.train = table.empty_like();
    out.val = table.empty_like();
    out.test = table.empty_like();

    for (std::size_t u = 0; u < table.n_users(); ++u) {
        auto& c = clean[u];
        if (c.size() < spec.min_user_interactions) {
            if (!c.empty() || !noisy[u].empty()) ++out.users_dropped;
            continue;
        }
        ++out.users_kept;
        Rng rng(derive_seed(spec.seed, 2 * u));
        shuffle_in_place(c.begin(), c.end(), rng);

        const std::size_t n = c.size();
        const auto part = [n](double frac) {
            return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(frac * static_cast<double>(n))));
        };
        std::size_t n_test = part(spec.test_frac);
        std::size_t n_val = part(spec.val_frac);
        while (n_test + n_val > n - 1) (n_test >= n_val ? n_test : n_val) -= 1;
        const std::size_t n_train = n - n_test - n_val;

        for (std::size_t k = 0; k < n; ++k) {
            const auto& rec = table.records[c[k]];
            (k < n_test ? out.test : k < n_test + n_val ? out.val : out.train).records.push_back(rec);
        }

        if (spec.noise_mode != NoiseMode::noise || noisy[u].empty()) continue;
        auto& z = noisy[u];
        Rng nrng(derive_seed(spec.seed, 2 * u + 1));
        shuffle_in_place(z.begin(), z.end(), nrng);
        std::size_t keep = z.size();
        if (spec.noise_cap) {
            keep = std::min(keep, static_cast<std::size_t>(*spec.noise_cap * static_cast<double>(n_train + n_val)));
        }
        out.noisy_discarded += z.size() - keep;
        const auto z_val = static_cast<std::size_t>(
            std::llround(spec.val_frac / (spec.train_frac + spec.val_frac) * static_cast<double>(keep)));
        for (std::size_t k = 0; k < keep; ++k) {
            const auto& rec = table.records[z[k]];
            if (k < z_val) {
                out.val.records.push_back(rec);
                ++out.noisy_val;
            } else {
                out.train.records.push_back(rec);
                ++out.noisy_train;
            }
        }
    }
    return out;
}

void write_split(const SplitResult& split, const SplitSpec& spec, const std::string& dir) {
    fs::create_directories(dir);
    const fs::path d(dir);
    write_interactions(split.train, (d / "train.tsv").string(), TableFormat::tsv);
    write_interactions(split.val, (d / "val.tsv").string(), TableFormat::tsv);
    write_interactions(split.test, (d / "test.tsv").string(), TableFormat::tsv);
    auto write_ids = [](const std::vector<std::string>& ids, const fs::path& p) {
        std::ofstream os(p);
        if (!os) throw std::runtime_error("cannot write " + p.string());
        for (const auto& id : ids) os << id << '\n';
    };
    write_ids(split.train.user_ids, d / "users.txt");
    write_ids(split.train.item_ids, d / "items.txt");

    json m;
    m["seed"] = spec.seed;
    m["spec"] = {{"train_frac", spec.train_frac},
                 {"val_frac", spec.val_frac},
                 {"test_frac", spec.test_frac},
                 {"min_user_interactions", spec.min_user_interactions},
                 {"noise_mode", spec.noise_mode == NoiseMode::noise ? "noise" : "clean"},
                 {"noise_rating_threshold", spec.noise_rating_threshold},
                 {"noise_cap", spec.noise_cap ? json(*spec.noise_cap) : json(nullptr)}};
    m["counts"] = {{"users", split.train.n_users()},
                   {"items", split.train.n_items()},
                   {"train", split.train.records.size()},
                   {"val", split.val.records.size()},
                   {"test", split.test.records.size()},
                   {"noisy_train", split.noisy_train},
                   {"noisy_val", split.noisy_val},
                   {"noisy_discarded", split.noisy_discarded}};
    m["users_kept"] = split.users_kept;
    m["users_dropped"] = split.users_dropped;
    std::ofstream os(d / "manifest.json");
    os << m.dump(2) << '\n';
}

SplitResult read_split(const std::string& dir) {
    const fs::path d(dir);
    auto read_ids = [](const fs::path& p) {
        std::ifstream is(p);
        if (!is) throw std::runtime_error("missing id map: " + p.string());
        std::vector<std::string> ids;
        std::string line;
        while (std::getline(is, line))
            if (!line.empty()) ids.push_back(line);
        return ids;
    };
    const auto users = read_ids(d / "users.txt");
    const auto items = read_ids(d / "items.txt");
    SplitResult s;
    s.train = load_interactions((d / "train.tsv").string(), TableFormat::tsv, users, items);
    s.val = load_interactions((d / "val.tsv").string(), TableFormat::tsv, users, items);
    s.test = load_interactions((d / "test.tsv").string(), TableFormat::tsv, users, items);
    if (auto is = std::ifstream(d / "manifest.json")) {
        const auto m = json::parse(is);
        s.users_kept = m.value("users_kept", std::size_t{0});
        s.users_dropped = m.value("users_dropped", std::size_t{0});
        s.noisy_train = m["counts"].value("noisy_train", std::size_t{0});
        s.noisy_val = m["counts"].value("noisy_val", std::size_t{0});
    }
    return s;
}

void SynthSpec::validate() const {
    if (n_users == 0 || n_items < 2 || d_true == 0) throw std::invalid_argument("synth: degenerate sizes");
    if (!(density > 0.0 && density < 1.0)) throw std::invalid_argument("synth: density must lie in (0,1)");
    if (!(noise_flip_rate >= 0.0 && noise_flip_rate < 1.0))
        throw std::invalid_argument("synth: noise_flip_rate must lie in [0,1)");
}

double SynthData::latent_logit(std::size_t u, std::size_t i, std::size_t d) const {
    double dot = 0.0;
    for (std::size_t k = 0; k < d; ++k) dot += user_factors[u * d + k] * item_factors[i * d + k];
    return dot / std::sqrt(static_cast<double>(d));
}

SynthData synth_generate(const SynthSpec& spec) {
    spec.validate();
    SynthData out;
    const std::size_t d = spec.d_true, nu = spec.n_users, ni = spec.n_items;

    Rng rf(derive_seed(spec.seed, 101));
    out.user_factors.resize(nu * d);
    out.item_factors.resize(ni * d);
    for (double& x : out.user_factors) x = standard_normal(rf);
    for (double& x : out.item_factors) x = standard_normal(rf);

    std::vector<double> logits(nu * ni);
    for (std::size_t u = 0; u < nu; ++u)
        for (std::size_t i = 0; i < ni; ++i) logits[u * ni + i] = out.latent_logit(u, i, d);

    const auto target = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(spec.density * static_cast<double>(logits.size()))), 1,
        logits.size() - 1);
    std::vector<double> sorted = logits;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(target - 1), sorted.end(),
                     std::greater<>());
    out.threshold = sorted[target - 1];

    std::size_t n_clean = 0;
    for (double l : logits) n_clean += l >= out.threshold ? 1 : 0;
    const std::size_t n_neg = logits.size() - n_clean;
    const double p = spec.noise_flip_rate;
    const double flip_prob =
        n_neg == 0 ? 0.0 : std::min(1.0, p * static_cast<double>(n_clean) / ((1.0 - p) * static_cast<double>(n_neg)));

    for (std::size_t u = 0; u < nu; ++u) out.table.user_ids.push_back("u" + std::to_string(u));
    for (std::size_t i = 0; i < ni; ++i) out.table.item_ids.push_back("i" + std::to_string(i));

    Rng rn(derive_seed(spec.seed, 202));
    for (std::size_t u = 0; u < nu; ++u) {
        for (std::size_t i = 0; i < ni; ++i) {
            if (logits[u * ni + i] >= out.threshold) {
                out.table.records.push_back({u, i, kCleanRating, std::nullopt});
                ++out.n_clean;
            } else if (flip_prob > 0.0 && uniform01(rn) < flip_prob) {
                out.table.records.push_back({u, i, kNoisyRating, std::nullopt});
                ++out.n_noisy;
            }
        }
    }
    return out;
}

}  // namespace llpauc
