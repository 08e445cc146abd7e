#pragma once

#include <ostream>
#include <string>

#include "doctest.h"
#include "qvo/cartan.hpp"
#include "qvo/modules.hpp"

namespace qvo {

inline bool operator==(const Scalar& a, const Scalar& b) { return a.equals(b, 1e-9); }
inline std::ostream& operator<<(std::ostream& os, const Scalar& s) { return os << s.str(); }

}  // namespace qvo

namespace qvo::test {

inline CartanPtr A1() { return CartanData::preset("A1"); }
inline CartanPtr A2() { return CartanData::preset("A2"); }
inline CartanPtr B2() { return CartanData::preset("B2"); }

inline Scalar qp(const Frac& e, const QMode& mode = QMode::Exact()) { return Scalar::q_pow(e, mode); }
inline Scalar qp(long e) { return qp(Frac(e)); }

inline Weight fund(const CartanPtr& c, std::vector<Frac> f) { return Weight::from_fund(c, std::move(f)); }

inline ModulePtr spec(const CartanPtr& c, const std::string& s, const QMode& mode = QMode::Exact()) {
  return module_from_spec(c, s, mode);
}

// Index of the unique basis vector of weight w.
inline int index_of(const ModulePtr& m, const Weight& w) {
  for (int b = 0; b < m->dim(); ++b)
    if (m->weight(b) == w) return b;
  FAIL("no basis vector of weight " << w.str());
  return -1;
}

inline void require_equal(const GradedMap& a, const GradedMap& b) {
  CompareResult r = compare_maps(a, b);
  INFO("(" << r.row << "," << r.col << "): " << r.lhs << " vs " << r.rhs);
  CHECK(r.pass);
}

inline void require_equal(const Matrix& a, const Matrix& b) {
  CompareResult r = compare(a, b, {}, 0.0);
  INFO("(" << r.row << "," << r.col << "): " << r.lhs << " vs " << r.rhs);
  CHECK(r.pass);
}

}  // namespace qvo::test
