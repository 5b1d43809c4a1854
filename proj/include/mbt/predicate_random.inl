#pragma once

#include <random>

namespace mbt::logic {

template <class Rng>
Valuation random_valuation(const Declarations& decls, Rng& rng, long grid) {
  Valuation u;
  for (const auto& d : decls.all()) {
    switch (d.kind) {
      case VarKind::Boolean:
        u.set_bool(d.name, std::uniform_int_distribution<int>(0, 1)(rng) == 1);
        break;
      case VarKind::Enumerated: {
        std::uniform_int_distribution<std::size_t> pick(0, d.values.size() - 1);
        u.set_enum(d.name, d.values[pick(rng)]);
        break;
      }
      case VarKind::Real: {
        Rational lo = d.bounds ? d.bounds->lo : Rational(-1000);
        Rational hi = d.bounds ? d.bounds->hi : Rational(1000);
        Rational steps_r = (hi - lo) * grid;
        mpz_class steps = steps_r.get_num() / steps_r.get_den();
        long long n = steps.fits_slong_p() ? steps.get_si() : 0;
        long long k = std::uniform_int_distribution<long long>(0, n)(rng);
        Rational v = lo + Rational(mpz_class(std::to_string(k), 10), mpz_class(grid));
        v.canonicalize();
        u.set_real(d.name, v);
        break;
      }
    }
  }
  return u;
}

}  // namespace mbt::logic
