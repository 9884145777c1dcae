#include "llpauc/model.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "llpauc/loss.hpp"

namespace llpauc {

static_assert(std::endian::native == std::endian::little, "checkpoint layout assumes a little-endian host");

double MfModel::logit(std::size_t u, std::size_t i) const {
    const double* p = user_vectors.data() + u * dim;
    const double* q = item_vectors.data() + i * dim;
    double dot = 0.0;
    for (std::size_t k = 0; k < dim; ++k) dot += p[k] * q[k];
    return dot;
}

double MfModel::score(std::size_t u, std::size_t i) const {
    if (u >= n_users) throw std::out_of_range("user id " + std::to_string(u) + " out of range");
    if (i >= n_items) throw std::out_of_range("item id " + std::to_string(i) + " out of range");
    return sigmoid(logit(u, i));
}

void MfModel::score_all_items(std::size_t u, std::span<double> out) const {
    if (u >= n_users) throw std::out_of_range("user id " + std::to_string(u) + " out of range");
    if (out.size() != n_items) throw std::invalid_argument("score_all_items: output size mismatch");
    for (std::size_t i = 0; i < n_items; ++i) out[i] = sigmoid(logit(u, i));
}

MfModel init_model(std::size_t n_users, std::size_t n_items, std::size_t dim, InitScheme scheme,
                   std::uint64_t seed, double sigma) {
    if (dim == 0) throw std::invalid_argument("embedding dimension must be positive");
    MfModel m;
    m.n_users = n_users;
    m.n_items = n_items;
    m.dim = dim;
    m.seed = seed;
    m.user_vectors.assign(n_users * dim, 0.0);
    m.item_vectors.assign(n_items * dim, 0.0);
    if (scheme == InitScheme::seeded_normal) {
        Rng ru(derive_seed(seed, 1));
        for (double& x : m.user_vectors) x = sigma * standard_normal(ru);
        Rng ri(derive_seed(seed, 2));
        for (double& x : m.item_vectors) x = sigma * standard_normal(ri);
    }
    return m;
}

EmbeddingGrad embedding_grads(const MfModel& m, std::span<const ScoreGrad> grads) {
    EmbeddingGrad g;
    g.dim = m.dim;
    for (const auto& sg : grads) {
        if (!std::isfinite(sg.grad)) throw std::invalid_argument("non-finite score gradient");
        const double f = m.score(sg.user, sg.item);
        const double dlogit = sg.grad * f * (1.0 - f);
        if (dlogit == 0.0) continue;
        auto& gu = g.users[sg.user];
        auto& gi = g.items[sg.item];
        if (gu.empty()) gu.assign(m.dim, 0.0);
        if (gi.empty()) gi.assign(m.dim, 0.0);
        const auto p = m.user(sg.user);
        const auto q = m.item(sg.item);
        for (std::size_t k = 0; k < m.dim; ++k) {
            gu[k] += dlogit * q[k];
            gi[k] += dlogit * p[k];
        }
    }
    return g;
}

void apply_embedding_grads(MfModel& m, const EmbeddingGrad& g, double lr, Direction dir) {
    const double step = dir == Direction::descent ? -lr : lr;
    for (const auto& [u, gu] : g.users) {
        auto row = m.user(u);
        for (std::size_t k = 0; k < m.dim; ++k) row[k] += step * gu[k];
    }
    for (const auto& [i, gi] : g.items) {
        auto row = m.item(i);
        for (std::size_t k = 0; k < m.dim; ++k) row[k] += step * gi[k];
    }
}

void apply_score_grads(MfModel& m, std::span<const ScoreGrad> grads, double lr, Direction dir) {
    apply_embedding_grads(m, embedding_grads(m, grads), lr, dir);
}

namespace {
constexpr char kMagic[8] = {'L', 'L', 'P', 'M', 'F', '0', '0', '1'};

void write_u64(std::ofstream& os, std::uint64_t v) { os.write(reinterpret_cast<const char*>(&v), sizeof v); }
std::uint64_t read_u64(std::ifstream& is) {
    std::uint64_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}
}  // namespace

void save_model(const MfModel& m, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open checkpoint for writing: " + path);
    os.write(kMagic, sizeof kMagic);
    write_u64(os, m.n_users);
    write_u64(os, m.n_items);
    write_u64(os, m.dim);
    write_u64(os, m.seed);
    os.write(reinterpret_cast<const char*>(m.user_vectors.data()),
             static_cast<std::streamsize>(m.user_vectors.size() * sizeof(double)));
    os.write(reinterpret_cast<const char*>(m.item_vectors.data()),
             static_cast<std::streamsize>(m.item_vectors.size() * sizeof(double)));
    if (!os) throw std::runtime_error("failed writing checkpoint: " + path);
}

MfModel load_model(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[8] = {};
    is.read(magic, sizeof magic);
    if (!is || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw std::runtime_error("not a model checkpoint: " + path);
    MfModel m;
    m.n_users = read_u64(is);
    m.n_items = read_u64(is);
    m.dim = read_u64(is);
    m.seed = read_u64(is);
    if (!is || m.dim == 0 || m.n_users > (1ULL << 32) || m.n_items > (1ULL << 32) || m.dim > 4096)
        throw std::runtime_error("corrupt checkpoint header: " + path);
    m.user_vectors.resize(m.n_users * m.dim);
    m.item_vectors.resize(m.n_items * m.dim);
    is.read(reinterpret_cast<char*>(m.user_vectors.data()),
            static_cast<std::streamsize>(m.user_vectors.size() * sizeof(double)));
    is.read(reinterpret_cast<char*>(m.item_vectors.data()),
            static_cast<std::streamsize>(m.item_vectors.size() * sizeof(double)));
    if (!is) throw std::runtime_error("truncated checkpoint: " + path);
    return m;
}

}  // namespace llpauc
