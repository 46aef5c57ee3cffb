#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace dform::testing {

// Covers every node kind; all are smooth on [0.3, 2.5]^2 apart from
// abs(x - y) on the diagonal, which samplers avoid.
inline const std::vector<std::string> kDerivativeCorpus = {
    "x^2*y",
    "sin(x)*cos(y)",
    "tan(x/3)+y",
    "sinh(x*y/4)",
    "cosh(x-y)",
    "tanh(2*x+y)",
    "exp(-x^2-y^2)",
    "ln(x^2+y^2+1)",
    "log10(1+x^2*y^2)",
    "sqrt(x^2+y^2+1)",
    "abs(x-y)+x",
    "-x*y^3",
    "x/(1+y^2)",
    "(x+2)^(y/3)",
    "e^(x*y/5)",
    "pi*x - y/pi",
    "x**3 - 3*x*y**2",
    "exp(-sqrt(x^2+y^2))/sqrt(x^2+y^2)",
    "y*sin(x) - x*cos(y)",
    "sqrt(abs(x*y)+1)*ln(2+cos(x))",
};

struct GrammarCase {
    std::string source;
    std::size_t offset;
};

inline const std::vector<GrammarCase> kGrammarErrors = {
    {"y*sin(x", 5}, {"", 0},   {"x + foo(y)", 4}, {"y sin(x)", 2}, {"2x", 1},
    {"x)", 1},      {"x+", 1}, {"x # y", 2},      {"sin x", 0},
};

}  // namespace dform::testing
