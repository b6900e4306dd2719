#include "stabcheck/simplicial.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace stabcheck {

namespace {

Simplex sorted_key(const Simplex& s) {
    Simplex k = s;
    std::sort(k.begin(), k.end());
    return k;
}

// Parity (+1/-1) of the permutation taking tuple a to tuple b (same vertex set).
int permutation_parity(const Simplex& a, const Simplex& b) {
    std::vector<int> perm(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        auto it = std::find(b.begin(), b.end(), a[i]);
        perm[i] = int(it - b.begin());
    }
    int inversions = 0;
    for (std::size_t i = 0; i < perm.size(); ++i)
        for (std::size_t j = i + 1; j < perm.size(); ++j)
            if (perm[i] > perm[j]) ++inversions;
    return inversions % 2 == 0 ? 1 : -1;
}

} // namespace

SimplicialComplex SimplicialComplex::build(const std::vector<Simplex>& top_simplices,
                                           const std::map<int, std::vector<double>>& coords) {
    SimplicialComplex K;
    K.coords_ = coords;

    int dim = 0;
    for (const auto& s : top_simplices) {
        if (s.empty()) throw ComplexError("empty simplex");
        std::set<int> uniq(s.begin(), s.end());
        if (uniq.size() != s.size()) throw ComplexError("repeated vertex in simplex");
        if (!coords.empty())
            for (int v : s)
                if (!coords.count(v))
                    throw ComplexError("dangling vertex id " + std::to_string(v));
        dim = std::max(dim, int(s.size()) - 1);
    }
    K.simplices_.resize(dim + 1);
    K.index_.resize(dim + 1);

    auto insert = [&K](const Simplex& s) -> bool {
        const int k = int(s.size()) - 1;
        const Simplex key = sorted_key(s);
        auto it = K.index_[k].find(key);
        if (it != K.index_[k].end()) {
            // duplicate: orientations must agree up to even permutation
            const Simplex& stored = K.simplices_[k][it->second];
            if (k >= 1 && permutation_parity(s, stored) != 1)
                throw ComplexError("inconsistent duplicate orientations");
            return false;
        }
        K.index_[k].emplace(key, int(K.simplices_[k].size()));
        K.simplices_[k].push_back(s);
        return true;
    };

    // top simplices keep their given orientation; faces get sorted order
    std::deque<Simplex> queue;
    for (const auto& s : top_simplices)
        if (insert(s)) queue.push_back(s);
    while (!queue.empty()) {
        Simplex s = queue.front();
        queue.pop_front();
        if (s.size() == 1) continue;
        for (std::size_t omit = 0; omit < s.size(); ++omit) {
            Simplex f;
            for (std::size_t i = 0; i < s.size(); ++i)
                if (i != omit) f.push_back(s[i]);
            f = sorted_key(f);
            if (insert(f)) queue.push_back(f);
        }
    }

    // vertices mentioned only in the coordinate table still belong to the complex
    for (const auto& [v, xyz] : coords) {
        (void)xyz;
        insert(Simplex{v});
    }
    return K;
}

int SimplicialComplex::index_of(int k, const Simplex& s) const {
    if (k < 0 || k > dimension()) return -1;
    auto it = index_[k].find(sorted_key(s));
    return it == index_[k].end() ? -1 : it->second;
}

IntegerMatrix SimplicialComplex::boundary_matrix(int k) const {
    if (k < 1 || k > dimension())
        throw ComplexError("boundary degree out of range: " + std::to_string(k));
    IntegerMatrix M(count(k - 1), count(k));
    for (std::size_t j = 0; j < count(k); ++j) {
        const Simplex& s = simplices_[k][j];
        for (std::size_t omit = 0; omit < s.size(); ++omit) {
            Simplex f;
            for (std::size_t i = 0; i < s.size(); ++i)
                if (i != omit) f.push_back(s[i]);
            const int idx = index_of(k - 1, f);
            const int sign = (omit % 2 == 0 ? 1 : -1) *
                             permutation_parity(f, simplices_[k - 1][idx]);
            M(std::size_t(idx), j) += sign;
        }
    }
    return M;
}

long long SimplicialComplex::euler_characteristic() const {
    long long chi = 0;
    for (int k = 0; k <= dimension(); ++k)
        chi += (k % 2 == 0 ? 1LL : -1LL) * (long long)count(k);
    return chi;
}

namespace {

// k-simplices that are not a face of any (k+1)-simplex
std::vector<std::pair<int, int>> top_simplex_ids(const SimplicialComplex& K) {
    std::vector<std::pair<int, int>> tops;
    for (int k = 0; k <= K.dimension(); ++k) {
        std::set<Simplex> faces_above;
        for (const auto& s : K.simplices(k + 1 <= K.dimension() ? k + 1 : 0)) {
            if (k + 1 > K.dimension()) break;
            for (std::size_t omit = 0; omit < s.size(); ++omit) {
                Simplex f;
                for (std::size_t i = 0; i < s.size(); ++i)
                    if (i != omit) f.push_back(s[i]);
                std::sort(f.begin(), f.end());
                faces_above.insert(f);
            }
        }
        for (std::size_t j = 0; j < K.count(k); ++j) {
            Simplex key = K.simplices(k)[j];
            std::sort(key.begin(), key.end());
            if (k == K.dimension() || !faces_above.count(key)) tops.emplace_back(k, int(j));
        }
    }
    return tops;
}

} // namespace

SimplicialComplex SimplicialComplex::barycentric_subdivision() const {
    // one new vertex per simplex; global ids in (dimension, index) order
    std::vector<std::size_t> offset(dimension() + 2, 0);
    for (int k = 0; k <= dimension(); ++k) offset[k + 1] = offset[k] + count(k);
    auto vid = [&offset](int k, int idx) { return int(offset[k] + idx); };

    std::map<int, std::vector<double>> new_coords;
    if (!coords_.empty()) {
        for (int k = 0; k <= dimension(); ++k)
            for (std::size_t j = 0; j < count(k); ++j) {
                const Simplex& s = simplices_[k][j];
                std::vector<double> bary(coords_.begin()->second.size(), 0.0);
                for (int v : s) {
                    const auto& c = coords_.at(v);
                    for (std::size_t d = 0; d < bary.size(); ++d) bary[d] += c[d];
                }
                for (auto& b : bary) b /= double(s.size());
                new_coords[vid(k, int(j))] = bary;
            }
    }

    std::vector<Simplex> new_tops;
    for (const auto& [k, j] : top_simplex_ids(*this)) {
        const Simplex& s = simplices_[k][j];
        Simplex perm = s;
        std::sort(perm.begin(), perm.end());
        // each permutation of the vertices yields one maximal flag
        do {
            Simplex flag;
            for (int len = 1; len <= int(perm.size()); ++len) {
                Simplex sub(perm.begin(), perm.begin() + len);
                flag.push_back(vid(len - 1, index_of(len - 1, sub)));
            }
            new_tops.push_back(flag);
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    return build(new_tops, new_coords);
}

HomologyProfile homology_profile(const SimplicialComplex& K) {
    HomologyProfile H;
    const int dim = K.dimension();
    std::vector<std::size_t> rank(dim + 2, 0);
    std::vector<std::vector<BigInt>> tors(dim + 1);
    for (int k = 1; k <= dim; ++k) {
        const auto factors = invariant_factors(K.boundary_matrix(k));
        rank[k] = factors.size();
        for (const auto& d : factors)
            if (d > 1) tors[k - 1].push_back(d);
    }
    H.betti.resize(dim + 1);
    H.torsion = std::move(tors);
    for (int k = 0; k <= dim; ++k)
        H.betti[k] = K.count(k) - rank[k] - rank[k + 1];
    H.euler = K.euler_characteristic();
    return H;
}

Chain boundary(const SimplicialComplex& K, const Chain& c) {
    Chain out;
    out.degree = c.degree - 1;
    if (c.degree < 1) return out;
    IntegerMatrix M = K.boundary_matrix(c.degree);
    for (const auto& [j, coef] : c.coefficients)
        for (std::size_t i = 0; i < M.rows(); ++i) {
            if (M(i, std::size_t(j)) == 0) continue;
            out.coefficients[int(i)] += M(i, std::size_t(j)) * coef;
        }
    for (auto it = out.coefficients.begin(); it != out.coefficients.end();)
        it = it->second == 0 ? out.coefficients.erase(it) : std::next(it);
    return out;
}

Chain fundamental_cycle(const SimplicialComplex& K) {
    const int d = K.dimension();
    if (d < 1) throw ComplexError("fundamental_cycle: dimension must be >= 1");

    IntegerMatrix M = K.boundary_matrix(d);
    std::vector<std::vector<std::pair<std::size_t, int>>> cofaces(K.count(d - 1));
    for (std::size_t j = 0; j < M.cols(); ++j)
        for (std::size_t i = 0; i < M.rows(); ++i)
            if (M(i, j) != 0) cofaces[i].emplace_back(j, M(i, j) > 0 ? 1 : -1);

    bool closed = true;
    for (const auto& cf : cofaces)
        if (cf.size() != 2) closed = false;

    Chain c;
    c.degree = d;
    for (std::size_t j = 0; j < K.count(d); ++j) c.coefficients[int(j)] = 1;
    if (closed && boundary(K, c).coefficients.empty()) return c;

    // orientation propagation across the dual graph: coherent across a shared
    // face iff the two incidence signs cancel after flipping; run this before
    // the closedness error so non-orientability is reported as such
    std::vector<int> eps(K.count(d), 0);
    for (std::size_t seed = 0; seed < K.count(d); ++seed) {
        if (eps[seed] != 0) continue;
        eps[seed] = 1;
        std::deque<std::size_t> bfs{seed};
        while (!bfs.empty()) {
            std::size_t s = bfs.front();
            bfs.pop_front();
            for (std::size_t f = 0; f < cofaces.size(); ++f) {
                const auto& cf = cofaces[f];
                if (cf.size() != 2) continue;
                if (cf[0].first != s && cf[1].first != s) continue;
                const auto& other = cf[0].first == s ? cf[1] : cf[0];
                const auto& self = cf[0].first == s ? cf[0] : cf[1];
                const int want = -eps[s] * self.second * other.second;
                if (eps[other.first] == 0) {
                    eps[other.first] = want;
                    bfs.push_back(other.first);
                } else if (eps[other.first] != want) {
                    throw ComplexError("fundamental_cycle: non-orientable manifold");
                }
            }
        }
    }
    if (!closed)
        throw ComplexError("fundamental_cycle: not a closed combinatorial manifold");
    throw ComplexError("fundamental_cycle: top simplices are not coherently oriented");
}

SimplicialComplex read_mesh(std::istream& in) {
    std::size_t nv = 0, nt = 0, dim = 0;
    if (!(in >> nv >> nt >> dim)) throw ComplexError("mesh: malformed header");
    std::string rest;
    std::getline(in, rest);

    std::map<int, std::vector<double>> coords;
    for (std::size_t v = 0; v < nv; ++v) {
        std::string line;
        if (!std::getline(in, line)) throw ComplexError("mesh: missing vertex line");
        std::istringstream ls(line);
        std::vector<double> c(dim);
        for (std::size_t d = 0; d < dim; ++d)
            if (!(ls >> c[d])) throw ComplexError("mesh: malformed vertex line");
        coords[int(v)] = c;
    }
    std::vector<Simplex> tops;
    for (std::size_t t = 0; t < nt; ++t) {
        std::string line;
        if (!std::getline(in, line)) throw ComplexError("mesh: missing simplex line");
        std::istringstream ls(line);
        Simplex s;
        int id;
        while (ls >> id) s.push_back(id);
        if (s.empty()) throw ComplexError("mesh: empty simplex line");
        for (int v : s)
            if (v < 0 || std::size_t(v) >= nv) throw ComplexError("mesh: vertex id out of range");
        tops.push_back(s);
    }
    return SimplicialComplex::build(tops, coords);
}

SimplicialComplex read_mesh_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ComplexError("cannot open mesh file: " + path);
    return read_mesh(f);
}

void write_mesh(std::ostream& out, const SimplicialComplex& K) {
    const auto& coords = K.coordinates();
    auto tops = top_simplex_ids(K);
    const std::size_t dim = coords.empty() ? 0 : coords.begin()->second.size();
    out << coords.size() << " " << tops.size() << " " << dim << "\n";
    out.precision(17);
    for (const auto& [v, c] : coords) {
        (void)v;
        for (std::size_t d = 0; d < c.size(); ++d) out << (d ? " " : "") << c[d];
        out << "\n";
    }
    for (const auto& [k, j] : tops) {
        const Simplex& s = K.simplices(k)[j];
        for (std::size_t i = 0; i < s.size(); ++i) out << (i ? " " : "") << s[i];
        out << "\n";
    }
}

} // namespace stabcheck
