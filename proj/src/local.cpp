// local.cpp

#include "bihom/local.hpp"

#include "bihom/numtheory.hpp"

#include <cmath>

namespace bihom {

namespace {

bool next_residue(IntVector& v, Int q) {
  for (std::size_t i = v.size(); i-- > 0;) {
    if (++v[i] < q) return true;
    v[i] = 0;
  }
  return false;
}

void check_budget(double work, double budget, const std::string& what) {
  if (budget > 0 && work > budget) {
    throw BudgetExceeded(what + " needs " + std::to_string(work) + " residues, budget " +
                         std::to_string(budget));
  }
}

Rational inv_power(Int q, int e) {
  return Rational(BigInt(1), boost::multiprecision::pow(BigInt(q), static_cast<unsigned>(e)));
}

bool linear(const FormSystem& sys) { return sys.d1() == 1 || sys.d2() == 1; }

}  // namespace

Int count_mod_q(const FormSystem& sys, Int q, const LocalOptions& opts) {
  if (q < 1) throw std::invalid_argument("q must be positive");
  bool fibered = opts.strategy == CongruenceStrategy::fibered ||
                 (opts.strategy == CongruenceStrategy::automatic && linear(sys));
  if (fibered && !linear(sys)) {
    throw std::invalid_argument("fibered strategy needs a system linear in x or in y");
  }
  if (!fibered) {
    check_budget(std::pow(static_cast<double>(q), sys.total_dim()), opts.budget, "count_mod_q");
    Int count = 0;
    IntVector x(sys.n1(), 0), y(sys.n2(), 0);
    do {
      std::fill(y.begin(), y.end(), 0);
      do {
        bool zero = true;
        for (int i = 0; i < sys.R() && zero; ++i) zero = sys.eval_mod(i, x.data(), y.data(), q) == 0;
        count += zero;
      } while (next_residue(y, q));
    } while (next_residue(x, q));
    return count;
  }
  Axis fiber = sys.d2() == 1 ? Axis::y : Axis::x;
  LinearFiber lf = sys.linear_fiber_for(fiber);
  const int m = lf.fiber_dim(), R = lf.forms();
  check_budget(std::pow(static_cast<double>(q), lf.outer_dim()), opts.budget, "count_mod_q");
  // Kernel of y -> C y mod q has q^m / |image| = q^m * index / q^R elements.
  const Int qm = ipow(q, m), qR = ipow(q, R);
  IntVector o(lf.outer_dim(), 0);
  std::vector<Int128> c(static_cast<std::size_t>(R) * m), ov(lf.outer_dim());
  std::vector<IntVector> cols(m, IntVector(R));
  Int count = 0;
  do {
    for (int j = 0; j < lf.outer_dim(); ++j) ov[j] = o[j];
    lf.coefficients<Int128>(ov.data(), c.data());
    for (int k = 0; k < m; ++k) {
      for (int i = 0; i < R; ++i) cols[k][i] = static_cast<Int>(c[i * m + k] % q);
    }
    ModLattice lat = column_lattice_mod(cols, R, q);
    count += qm / (qR / lat.index());
  } while (next_residue(o, q));
  return count;
}

CoprimeSum coprime_sum(const FormSystem& sys, Int q, const LocalOptions& opts) {
  if (q < 1) throw std::invalid_argument("q must be positive");
  ExpSumOptions eo;
  eo.budget = opts.budget;
  eo.strategy = opts.strategy == CongruenceStrategy::brute ? SumStrategy::direct
                                                           : SumStrategy::automatic;
  const int R = sys.R();
  std::vector<Int> total(q, 0);
  Complex fl = 0;
  double mass = 0;
  IntVector a(R, 0);
  do {
    Int g = q;
    for (Int v : a) g = gcd(g, v);
    if (g != 1) continue;
    CompleteSum cs = complete_sum(sys, a, q, eo);
    for (Int m = 0; m < q; ++m) total[m] += cs.histogram[m];
    fl += cs.value;
    mass += std::pow(static_cast<double>(q), sys.total_dim());
  } while (next_residue(a, q));

  // C_m depends only on gcd(m, q).
  for (Int m = 0; m < q; ++m) {
    if (total[m] != total[gcd(m, q) % q]) {
      throw std::logic_error("coprime histogram is not constant on unit orbits");
    }
  }
  CoprimeSum out;
  out.q = q;
  out.exact = 0;
  for (Int g : divisors(q)) out.exact += BigInt(total[g % q]) * mobius(q / g);
  out.float_value = fl.real();
  out.float_imag = fl.imag();
  double diff = std::abs(fl - Complex(static_cast<double>(out.exact), 0.0));
  if (diff > 1e-10 * std::max(1.0, mass)) {
    throw std::logic_error("floating-point complete sums disagree with exact assembly at q = " +
                           std::to_string(q));
  }
  return out;
}

SeriesResult singular_series_partial(const FormSystem& sys, Int Q, const LocalOptions& opts) {
  if (Q < 1) throw std::invalid_argument("Q must be positive");
  SeriesResult out;
  const int n = sys.total_dim();
  out.value = 0;
  for (Int q = 1; q <= Q; ++q) {
    BigInt A;
    auto fac = factorize(q);
    if (q == 1) {
      A = 1;
    } else if (opts.multiplicative && fac.size() > 1) {
      A = 1;
      for (auto [p, e] : fac) A *= out.a_values.at(ipow(p, e));
    } else {
      A = coprime_sum(sys, q, opts).exact;
    }
    out.a_values[q] = A;
    out.value += Rational(A) * inv_power(q, n);
  }
  return out;
}

LocalFactor local_factor(const FormSystem& sys, Int p, int l, const LocalOptions& opts) {
  if (!is_prime(p)) throw std::invalid_argument("local factor needs a prime");
  if (l < 0) throw std::invalid_argument("depth must be >= 0");
  LocalFactor out;
  out.p = p;
  out.l = l;
  out.partial = 1;
  const int n = sys.total_dim();
  Int pk = 1;
  for (int k = 1; k <= l; ++k) {
    pk *= p;
    out.partial += Rational(coprime_sum(sys, pk, opts).exact) * inv_power(pk, n);
  }
  return out;
}

OrthogonalityCheck orthogonality_check(const FormSystem& sys, Int p, int l,
                                       const LocalOptions& lhs_opts,
                                       const LocalOptions& rhs_opts) {
  OrthogonalityCheck out;
  out.lhs = local_factor(sys, p, l, lhs_opts).partial;
  const Int q = ipow(p, l);
  out.count = count_mod_q(sys, q, rhs_opts);
  out.rhs = Rational(out.count) * inv_power(p, l * (sys.total_dim() - sys.R()));
  return out;
}

bool verify_padic_witness(const FormSystem& sys, const PadicWitness& w) {
  if (!is_prime(w.p)) return false;
  if (static_cast<int>(w.x.size()) != sys.n1() || static_cast<int>(w.y.size()) != sys.n2()) {
    return false;
  }
  for (int i = 0; i < sys.R(); ++i) {
    if (sys.eval_mod(i, w.x.data(), w.y.data(), w.p) != 0) return false;
  }
  std::vector<IntVector> jac(sys.R());
  for (int i = 0; i < sys.R(); ++i) {
    for (int j = 0; j < sys.n1(); ++j) jac[i].push_back(sys.partial_mod(i, Axis::x, j, w.x.data(), w.y.data(), w.p));
    for (int k = 0; k < sys.n2(); ++k) jac[i].push_back(sys.partial_mod(i, Axis::y, k, w.x.data(), w.y.data(), w.p));
  }
  return rank_mod_p(jac, w.p) == sys.R();
}

PadicSearch find_nonsingular_padic_zero(const FormSystem& sys, Int p, int search_depth,
                                        double budget) {
  if (!is_prime(p)) throw std::invalid_argument("p must be prime");
  if (search_depth < 1) throw std::invalid_argument("search depth must be >= 1");
  PadicSearch out;
  check_budget(std::pow(static_cast<double>(p), sys.total_dim()), budget, "p-adic search");
  IntVector x(sys.n1(), 0), y(sys.n2(), 0);
  std::vector<IntVector> jac(sys.R());
  std::size_t singular_zeros = 0;
  do {
    std::fill(y.begin(), y.end(), 0);
    do {
      bool zero = true;
      for (int i = 0; i < sys.R() && zero; ++i) zero = sys.eval_mod(i, x.data(), y.data(), p) == 0;
      if (!zero) continue;
      for (int i = 0; i < sys.R(); ++i) {
        jac[i].clear();
        for (int j = 0; j < sys.n1(); ++j) jac[i].push_back(sys.partial_mod(i, Axis::x, j, x.data(), y.data(), p));
        for (int k = 0; k < sys.n2(); ++k) jac[i].push_back(sys.partial_mod(i, Axis::y, k, x.data(), y.data(), p));
      }
      int rank = rank_mod_p(jac, p);
      if (rank == sys.R()) {
        out.witness = PadicWitness{p, x, y, rank};
        return out;
      }
      ++singular_zeros;
    } while (next_residue(y, p));
  } while (next_residue(x, p));
  out.inconclusive = singular_zeros;
  if (search_depth >= 2) {
    // Zeros mod p^2 in the singular case; rank-deficient mod p, so they
    // cannot be certified here.
    const Int q = p * p;
    check_budget(std::pow(static_cast<double>(q), sys.total_dim()), budget, "p-adic search");
    std::size_t deep = 0;
    std::fill(x.begin(), x.end(), 0);
    do {
      std::fill(y.begin(), y.end(), 0);
      do {
        bool zero = true;
        for (int i = 0; i < sys.R() && zero; ++i) zero = sys.eval_mod(i, x.data(), y.data(), q) == 0;
        deep += zero;
      } while (next_residue(y, q));
    } while (next_residue(x, q));
    out.inconclusive = deep;
    out.depth_searched = 2;
  }
  return out;
}

}  // namespace bihom
