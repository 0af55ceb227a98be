#pragma once

#include <vector>

#include "formlab/forms.hpp"

namespace formlab {

// Integer model of a rational form for p-adic work: g = D * F cleared of
// denominators and divided by its content, so the entries are coprime
// (scaling does not change isotropy).
struct PadicModel {
    long p = 0;
    int n = 0;
    std::vector<std::vector<Integer>> g;  // symmetric, content 1
    int default_level = 0;                // 2*v_p(2*det g) + 3
};

PadicModel padic_model(const QuadraticForm& f, long p);

// Existence of a nonzero p-adic zero of F (equivalently a primitive one).
// Decision by breadth-first lifting of primitive solutions mod p^k with a
// Hensel certificate; n >= 5 short-circuits to true.  `level_cap` overrides
// the default search depth (useful mainly to provoke PadicUndecided).
bool is_isotropic_padic(const QuadraticForm& f, long p, int level_cap = 0);

// Same decision without the n >= 5 short-circuit; used to cross-check it.
bool padic_isotropy_by_search(const PadicModel& model, int level_cap = 0);

}  // namespace formlab
