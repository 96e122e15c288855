#pragma once

#include <utility>

#include "doctest.h"

#include "aid/errors.hpp"
#include "aid/prior.hpp"

namespace testutil {

// iid uniform on {0, 1}, two bidders; wel_max = 3/4, wel_min = 1/4.
inline aid::SymmetricPrior make_p1() {
  aid::SymmetricPrior p;
  p.n_bidders = 2;
  p.values = {0.0, 1.0};
  p.pmf = {{{0, 0}, 0.25}, {{1, 0}, 0.25}, {{0, 1}, 0.25}, {{1, 1}, 0.25}};
  return p;
}

// iid uniform on {0, 1/2, 1}, three bidders; wel_max = 5/6, wel_min = 1/6.
inline aid::SymmetricPrior make_iid3() {
  aid::SymmetricPrior p;
  p.n_bidders = 3;
  p.values = {0.0, 0.5, 1.0};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) p.pmf.push_back({{a, b, c}, 1.0 / 27});
  return p;
}

// max valuation is 1 on every profile but the profiles are not all constant.
inline aid::SymmetricPrior make_degenmax2() {
  aid::SymmetricPrior p;
  p.n_bidders = 2;
  p.values = {0.5, 1.0};
  p.pmf = {{{1, 0}, 1.0 / 3}, {{0, 1}, 1.0 / 3}, {{1, 1}, 1.0 / 3}};
  return p;
}

// iid uniform on {1/8, 3/8, 5/8, 7/8}; no profile has a single positive
// coordinate, so this sits in the general class.
inline aid::SymmetricPrior make_uniform4() {
  aid::SymmetricPrior p;
  p.n_bidders = 2;
  p.values = {0.125, 0.375, 0.625, 0.875};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) p.pmf.push_back({{a, b}, 1.0 / 16});
  return p;
}

// perfectly correlated coin flip: exchangeable, all profiles constant, but
// not a product of its own marginal.
inline aid::SymmetricPrior make_prodbad() {
  aid::SymmetricPrior p;
  p.n_bidders = 2;
  p.values = {0.0, 1.0};
  p.pmf = {{{0, 0}, 0.5}, {{1, 1}, 0.5}};
  return p;
}

// point mass at (1, 1).
inline aid::SymmetricPrior make_delta1() {
  aid::SymmetricPrior p;
  p.n_bidders = 2;
  p.values = {1.0};
  p.pmf = {{{0, 0}, 1.0}};
  return p;
}

template <typename F>
aid::ErrorCode thrown_code(F&& f) {
  try {
    std::forward<F>(f)();
  } catch (const aid::Error& e) {
    return e.code();
  }
  FAIL("expected an aid::Error");
  return aid::ErrorCode::InvalidArgument;
}

}  // namespace testutil
