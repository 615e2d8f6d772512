#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "qtoda/linalg.hpp"
#include "qtoda/multipoly.hpp"
#include "qtoda/report.hpp"

namespace qtoda {

// Exponent vector over p_0..p_n; a basis monomial has entry 0 at p_0 and
// exponent at most i at p_i.
using PExp = std::vector<int>;

using ClassRat = std::vector<Rat>;        // class with rational coordinates
using ClassPolyQ = std::vector<MultiPoly>;  // coordinates polynomial in q

std::string basis_label(const PExp& e);

// Classical cohomology ring of the complete flag manifold: quotient of
// Q[p_0..p_n] by the elementary symmetric ideal, built degree by degree with
// exact elimination; the standard monomial basis is verified, not assumed.
class FlagRing {
public:
    static const FlagRing& get(int n);  // cached per n, 1 <= n <= 4

    int n() const { return n_; }
    int rank() const { return static_cast<int>(basis_.size()); }
    int top_degree() const { return top_; }
    const std::vector<PExp>& basis() const { return basis_; }
    int basis_degree(int i) const { return degrees_[i]; }
    const std::vector<int>& graded_dims() const { return graded_dims_; }
    const Mat<Rat>& mult_matrix(int i) const { return mult_[i]; }
    const Mat<Rat>& gram() const { return gram_; }
    int top_index() const { return top_index_; }

    MultiPoly basis_poly(int i) const;

    // Coordinates of a polynomial in p_0..p_n modulo the ideal.
    ClassRat class_of(const MultiPoly& f) const;
    ClassRat mult_classes(const ClassRat& a, const ClassRat& b) const;
    // Multiplication by the basis monomial with exponents e.
    ClassRat apply_monomial(const PExp& e, ClassRat v) const;

    Rat integrate(const ClassRat& c) const;
    Rat pairing(const ClassRat& a, const ClassRat& b) const;

private:
    explicit FlagRing(int n);

    int n_, top_;
    std::vector<PExp> basis_;
    std::vector<int> degrees_;
    std::vector<int> graded_dims_;
    std::vector<Mat<Rat>> mult_;
    Mat<Rat> gram_;
    int top_index_ = -1;
    Rat scale_;
};

struct FiberPoint {
    std::vector<Cd> p;       // momenta p_0..p_n
    double residual;         // max_m |D_m(p,q)| / (1 + term scale)
    Cd jacobian;             // det dD_i/dp_j at the point
};

// Quantum ring Q[p,q]/(D_0..D_n) as a free module over Q[q] on the classical
// basis (verified), with quantum multiplication matrices polynomial in q.
class QuantumRing {
public:
    static const QuantumRing& get(int n);  // cached per n, 1 <= n <= 3

    int n() const { return n_; }
    int rank() const { return static_cast<int>(classical_->rank()); }
    const FlagRing& classical() const { return *classical_; }
    const Mat<MultiPoly>& mult_matrix(int i) const { return mult_[i]; }
    const std::vector<MultiPoly>& relations() const { return relations_; }

    ClassPolyQ class_of(const MultiPoly& f) const;
    ClassPolyQ apply_p(int i, const ClassPolyQ& v) const;
    ClassPolyQ quantum_product(const MultiPoly& a, const MultiPoly& b) const;
    // q-extended pairing of classes with polynomial coordinates.
    MultiPoly pairing_q(const ClassPolyQ& a, const ClassPolyQ& b) const;
    // Frobenius form on the quantum algebra: the integral of the quantum
    // product (top-class coefficient).  Reduces to the classical pairing
    // whenever the degrees sum to at most the top degree.
    MultiPoly frobenius_pairing(const ClassPolyQ& a, const ClassPolyQ& b) const;

    std::vector<Mat<Cd>> mult_at(const std::vector<Cd>& q) const;

    // Joint eigenvalues of the multiplication operators at numeric q; returns
    // (n+1)! simple points or throws after 5 retries with fresh combinations.
    std::vector<FiberPoint> fiber_points(const std::vector<Cd>& q, std::uint64_t seed,
                                         double tol = 1e-9) const;

    // Residue sum eps * sum A(p,q)B(p,q)/det(dD/dp); eps calibrated once per n
    // against the exact pairing (force_sign overrides for failure testing).
    Cd residue_pairing(const MultiPoly& a, const MultiPoly& b, const std::vector<Cd>& q,
                       std::uint64_t seed = 1, int force_sign = 0) const;
    int residue_sign() const;

private:
    explicit QuantumRing(int n);
    void calibrate_sign() const;

    int n_;
    const FlagRing* classical_;
    std::vector<MultiPoly> relations_;  // D_0..D_n
    std::vector<Mat<MultiPoly>> mult_;
    mutable int sign_ = 0;
};

// Example 6 identities, quotient rank, classical limit at q = 0.
CheckReport check_quantum_ring(int n);

// Residue pairing vs the exact Gram matrix at `samples` random q.
CheckReport check_residue_pairing(int n, int samples, std::uint64_t seed, int force_sign = 0);

}  // namespace qtoda
