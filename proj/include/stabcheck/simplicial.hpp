#ifndef STABCHECK_SIMPLICIAL_HPP
#define STABCHECK_SIMPLICIAL_HPP

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stabcheck/snf.hpp"

namespace stabcheck {

/// Ordered vertex-id tuple; the order fixes the simplex orientation.
using Simplex = std::vector<int>;

struct ComplexError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Finite simplicial complex with integer chain data, closed under faces.
/// Simplices of each dimension are stored in a stable indexed order.
class SimplicialComplex {
  public:
    /// Builds from top simplices (face closure automatic, orientation of the
    /// input simplices preserved). Vertex coordinates optional.
    static SimplicialComplex build(const std::vector<Simplex>& top_simplices,
                                   const std::map<int, std::vector<double>>& coords = {});

    int dimension() const { return int(simplices_.size()) - 1; }
    std::size_t count(int k) const {
        return (k >= 0 && k <= dimension()) ? simplices_[k].size() : 0;
    }
    const std::vector<Simplex>& simplices(int k) const { return simplices_[k]; }
    const std::map<int, std::vector<double>>& coordinates() const { return coords_; }

    /// Index of the simplex with this vertex set in dimension k, or -1.
    int index_of(int k, const Simplex& s) const;

    /// Signed boundary operator, (count(k-1) x count(k)); sign of a face is
    /// (-1)^(position of the omitted vertex) times the permutation parity
    /// between the face tuple and the stored tuple.
    IntegerMatrix boundary_matrix(int k) const;

    /// Alternating sum of simplex counts.
    long long euler_characteristic() const;

    /// First barycentric subdivision (top simplices must have |coords| when
    /// coordinates are present; subdivision vertices get barycenters).
    SimplicialComplex barycentric_subdivision() const;

  private:
    std::vector<std::vector<Simplex>> simplices_;       // per dimension
    std::vector<std::map<Simplex, int>> index_;         // sorted vertex set -> index
    std::map<int, std::vector<double>> coords_;
};

struct HomologyProfile {
    std::vector<std::size_t> betti;
    std::vector<std::vector<BigInt>> torsion;  // per degree
    long long euler = 0;
};

HomologyProfile homology_profile(const SimplicialComplex& K);

/// Integer k-chain of a fixed complex, sparse coefficient list by index.
struct Chain {
    int degree = 0;
    std::map<int, BigInt> coefficients;  // simplex index -> coefficient
};

/// Boundary of a chain as a (k-1)-chain.
Chain boundary(const SimplicialComplex& K, const Chain& c);

/// Sum-of-top-simplices fundamental cycle of a closed oriented combinatorial
/// manifold; throws ComplexError on non-manifold, non-orientable, or
/// incoherently oriented input.
Chain fundamental_cycle(const SimplicialComplex& K);

/// Text mesh format: "n_vertices n_topsimplices dim", then vertex coordinate
/// lines (dim numbers each), then top-simplex vertex-index lines.
SimplicialComplex read_mesh(std::istream& in);
SimplicialComplex read_mesh_file(const std::string& path);
void write_mesh(std::ostream& out, const SimplicialComplex& K);

} // namespace stabcheck

#endif
