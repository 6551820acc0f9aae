#pragma once

#include <string>
#include <vector>

#include "atsh/tableau.hpp"

namespace atsh {

// One algebraic condition on (b, c, A): lhs is the coefficient sum, rhs the
// phi-expression it must equal at the tableau's nu.
struct ConditionResidual {
    std::string tree_id; // "t21" .. "t7,10"
    int rho;
    double lhs;
    double rhs;
    double residual; // lhs - rhs
};

// Evaluates the 23 conditions with rho <= up_to_order (up_to_order in 2..7).
std::vector<ConditionResidual> residuals(const Tableau& tableau, int up_to_order = 7);

// Largest p <= 6 such that every condition with rho <= p + 1 has
// |residual| <= 1e-11.
int verify_order(const Tableau& tableau);

// Max-norm defect of the row-sum assumption A e = (c^2 + c)/2.
double simplifying_check(const Tableau& tableau);

} // namespace atsh
