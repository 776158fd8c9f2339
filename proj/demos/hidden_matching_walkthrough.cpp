// Walkthrough: the hidden-matching distribution at small sizes.
//
// Alice holds an n-bit string, Bob a perfect matching on the n indices; the
// honest outcome is an edge plus the parity of Alice's bits across it. The
// associated Bell functional rewards correct parities, punishes wrong ones,
// and is normalized so that no strategy, even one allowed to abort, exceeds 1.
// Everything below is computed in exact rational arithmetic; the quantum
// realization at the end is the one place floating point enters (amplitudes),
// and its Born probabilities are rationalized before the comparison.

#include <cstdio>
#include <string>

#include "belleff/dist.hpp"
#include "belleff/hidden_matching.hpp"
#include "belleff/quantum.hpp"

using namespace belleff;

namespace {

void line(const std::string& label, const std::string& value) {
    std::printf("  %-30s %s\n", label.c_str(), value.c_str());
}

}  // namespace

int main() {
    const int n = 4;
    const Rat C = 1;

    std::printf("== shape at n = %d ==\n", n);
    const auto matchings = enumerate_matchings(n);
    line("matchings", std::to_string(matchings.size()));
    for (const Matching& m : matchings) line("  " + matching_label(m), "");
    const Dist hm = hm_distribution(n);
    line("inputs (x, y)", std::to_string(hm.nx()) + " x " + std::to_string(hm.ny()));
    line("outputs (a, b)", std::to_string(hm.na()) + " x " + std::to_string(hm.nb()));

    std::printf("\n== the functional's value on the distribution ==\n");
    const HmObjective obj = hm_objective_check(n, C);
    line("scale", rat_to_string(obj.scale));
    line("streamed sum", rat_to_string(obj.computed));
    line("closed form scale/(2n)", rat_to_string(obj.closed_form));
    line("equal", obj.equal ? "yes, exactly" : "NO");
    line("support entries", std::to_string(obj.support_entries));

    std::printf("\n== normalization over abort strategies ==\n");
    const HmScan scan = hm_constraint_scan(n, C);
    line("matching-consistent bob maps", std::to_string(scan.maps_scanned));
    line("max strategy value", rat_to_string(scan.max_value));
    line("bounded by 1", scan.le_one ? "yes" : "NO");

    std::printf("\n== degree-two fourier mass ==\n");
    // the subset of strings Alice may abort on controls how much a classical
    // protocol can learn; its low-degree mass is the quantity that matters
    std::vector<unsigned long long> affine;
    for (unsigned long long u = 0; u < (1ULL << n); ++u)
        if (((u >> (n - 1)) & 1) == ((u >> (n - 2)) & 1)) affine.push_back(u);
    line("full cube", rat_to_string(degree2_fourier_mass(
                          std::vector<unsigned long long>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11,
                                                          12, 13, 14, 15},
                          n)));
    line("affine subcube (half)", rat_to_string(degree2_fourier_mass(affine, n)));
    line("single string {5}", rat_to_string(degree2_fourier_mass({5}, n)));

    std::printf("\n== quantum realization at n = 2 ==\n");
    const Dist small = hm_distribution(2);
    const Dist born = from_quantum(hm_quantum_setup(2));
    bool match = true;
    for (int x = 0; x < small.nx(); ++x)
        for (int y = 0; y < small.ny(); ++y)
            for (int a = 0; a < small.na(); ++a)
                for (int b = 0; b < small.nb(); ++b)
                    match = match && born.prob(x, y, a, b) == small.prob(x, y, a, b);
    line("log2(dim) qubit states", "1 per side");
    line("born == target", match ? "yes, after rationalization" : "NO");
    return 0;
}
