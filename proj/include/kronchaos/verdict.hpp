#pragma once

#include <string>

namespace kronchaos {

/// Outcome of an inequality check under estimation noise. Only a violation
/// whose evidence is separated (exact values, or non-overlapping confidence
/// bands) is a hard failure.
enum class Verdict { pass, inconclusive_pass, fail, skipped };

std::string to_string(Verdict v);
/// Worst of the two; skipped is neutral.
Verdict combine(Verdict a, Verdict b);
inline bool passed(Verdict v) { return v != Verdict::fail; }

/// lhs <= rhs, with the evidence behind the verdict.
struct InequalityCheck {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    Verdict verdict = Verdict::pass;
    std::string detail;
};

/// lhs <= rhs * (1 + rel_slack) + abs_slack. When violated, the verdict is
/// fail if `rhs_certified` (rhs is an exact value or an upper bound), and
/// inconclusive_pass otherwise (rhs is only a lower bound of the true value).
InequalityCheck check_leq(std::string name, double lhs, double rhs, bool rhs_certified, double rel_slack,
                          double abs_slack = 0.0);

}  // namespace kronchaos
