// Quantises the toric square [0,3]^2 and an almost-toric variant with one
// marked focus-focus point, printing both reports.
#include <cstdio>

#include "gq/gq.hpp"

int main() {
    gq::RunConfig cfg;
    gq::Polytope square{2, {{{1, 0}, 0.0}, {{-1, 0}, 3.0}, {{0, 1}, 0.0}, {{0, -1}, 3.0}}};

    gq::FibrationDescriptor toric;
    toric.base = gq::FibrationDescriptor::Base::ToricPolytope;
    toric.polytope = square;
    toric.compact = true;
    std::printf("%s\n", gq::emit_report(gq::quantise(toric, {}), cfg).c_str());

    gq::FibrationDescriptor almost;
    almost.base = gq::FibrationDescriptor::Base::AlmostToric4;
    almost.polytope = square;
    almost.compact = true;
    almost.ff_marks.push_back({{1.0, 1.0}, 1});
    std::printf("%s\n", gq::emit_report(gq::quantise(almost, {}), cfg).c_str());
    return 0;
}
