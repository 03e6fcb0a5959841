#include "kronchaos/verdict.hpp"

#include <cmath>
#include <sstream>

namespace kronchaos {

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::pass:
        return "pass";
    case Verdict::inconclusive_pass:
        return "inconclusive_pass";
    case Verdict::fail:
        return "fail";
    case Verdict::skipped:
        return "skipped";
    }
    return "unknown";
}

Verdict combine(Verdict a, Verdict b)
{
    auto rank = [](Verdict v) {
        switch (v) {
        case Verdict::skipped:
            return 0;
        case Verdict::pass:
            return 1;
        case Verdict::inconclusive_pass:
            return 2;
        case Verdict::fail:
            return 3;
        }
        return 3;
    };
    return rank(a) >= rank(b) ? a : b;
}

InequalityCheck check_leq(std::string name, double lhs, double rhs, bool rhs_certified, double rel_slack,
                          double abs_slack)
{
    InequalityCheck c{std::move(name), lhs, rhs, Verdict::pass, {}};
    const double limit = rhs * (1.0 + rel_slack) + abs_slack;
    std::ostringstream os;
    os.precision(17);
    if (!(std::isfinite(lhs) && std::isfinite(rhs))) {
        c.verdict = Verdict::fail;
        os << "non-finite operand: lhs=" << lhs << " rhs=" << rhs;
    } else if (lhs <= limit) {
        os << "lhs=" << lhs << " <= rhs=" << rhs;
    } else if (rhs_certified) {
        c.verdict = Verdict::fail;
        os << "violated: lhs=" << lhs << " > rhs=" << rhs << " (rhs certified)";
    } else {
        c.verdict = Verdict::inconclusive_pass;
        os << "lhs=" << lhs << " > rhs=" << rhs << " but rhs is only a lower bound";
    }
    c.detail = os.str();
    return c;
}

}  // namespace kronchaos
