#pragma once

#include <string>

#include "formlab/forms.hpp"

namespace formlab {

// Text format, one of:
//
//   # comment lines allowed anywhere
//   n 3
//   1 0 0
//   0 1 0
//   0 0 -sqrt(2)
//
//   diag 1 1 -sqrt(2)
//
// Entries use the scalar grammar ("2/3", "1.5e-3", "1/2+3/4*sqrt(2)").
QuadraticForm parse_form_text(const std::string& text);

// Inline spec for CLI use: "diag:1,1,-sqrt(2)" or "mat:1,0;0,-1".
// Anything else is rejected (callers resolve file paths themselves).
QuadraticForm parse_form_inline(const std::string& spec);

std::string emit_form_text(const QuadraticForm& f);    // round-trips via parse_form_text
std::string emit_form_inline(const QuadraticForm& f);  // round-trips via parse_form_inline

}  // namespace formlab
