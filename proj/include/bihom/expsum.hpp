// expsum.hpp
//
// Weyl sums S(alpha) over boxes, complete sums S_{a,q} with exact residue
// histograms, and the near-solution counters M1 (axis X) and M2 (axis Y).

#pragma once

#include "bihom/counting.hpp"
#include "bihom/forms.hpp"

#include <complex>
#include <optional>
#include <span>
#include <vector>

namespace bihom {

using Complex = std::complex<double>;

// e(t) = exp(2 pi i t).
Complex unit(double t);

// Fractional part of alpha * v in [0, 1), computed with extended precision.
double frac_product(double alpha, Int128 v);

// Deterministic pairwise (cascade) summation of complex values.
class PairwiseAccumulator {
 public:
  void add(Complex v);
  Complex total() const;

 private:
  static constexpr std::size_t kBlock = 64;
  Complex block_ = 0;
  std::size_t in_block_ = 0;
  std::vector<Complex> levels_;
  std::vector<bool> used_;
};

enum class SumStrategy { automatic, direct, fibered };

// Direct strategy accumulates every pair with pairwise summation; fibered
// evaluates the inner linear block in closed form (geometric sums).
Complex weyl_sum(const FormSystem& sys, std::span<const double> alpha, const BoxPair& boxes,
                 SumStrategy strategy = SumStrategy::automatic);

struct ExpSumOptions {
  // Refuses complete sums whose enumeration would touch more residues.
  double budget = 1e9;
  SumStrategy strategy = SumStrategy::automatic;
};

struct CompleteSum {
  Complex value;
  // histogram[m] = #{(x, y) mod q : a . F(x, y) = m mod q}.
  std::vector<Int> histogram;
};

CompleteSum complete_sum(const FormSystem& sys, const IntVector& a, Int q,
                         const ExpSumOptions& opts = {});

// sum_m c_m e(m / q) from a histogram.
Complex histogram_value(const std::vector<Int>& hist);

// Joint histogram of (F_1, ..., F_R) mod q, indexed by sum_i m_i q^i.
std::vector<Int> joint_histogram(const FormSystem& sys, Int q, const ExpSumOptions& opts = {});

// Number of tuples with ||Gamma(..., e_l, ...)|| < 1/bound for every l.
// Axis X puts the unit vector in the last x-slot (M1), axis Y in the last
// y-slot (M2). Coordinates range over |c| <= ceil(P) - 1.
struct NearSolutionOptions {
  double guard = 1e-12;
  double budget = 1e9;  // tuples
};

Int128 count_near_solutions(const FormSystem& sys, std::span<const double> alpha, double p1,
                            double p2, double bound, Axis axis,
                            const NearSolutionOptions& opts = {});

// Distance from t to the nearest integer.
double dist_to_int(double t);

}  // namespace bihom
