#pragma once

// A deliberately broken engine for harness self-tests: Limit semantics
// averages over the whole support instead of only the models satisfying the
// most conditions. Strict and Fixed delegate to the real engine.

#include <span>

#include "genlogic/inference.hpp"
#include "genlogic/oracle.hpp"

namespace genlogic::testing {

inline ProbResult unrestricted_limit(const Formula& alpha, std::span<const Formula> delta, const WorldTable& table,
                                     const Semantics& sem) {
  if (sem.regime() != Semantics::Regime::Limit) return conditional(alpha, delta, table, sem);
  return marginal(alpha, table);
}

inline oracle::ConditionalEngine mutant_engine() { return unrestricted_limit; }

}  // namespace genlogic::testing
