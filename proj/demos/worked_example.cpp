// Walkthrough: every integer that is 5 mod 6 and follows the exponent path
// (2, 3) under the 3x+1 map T(x) = (3x+1)/2^k forms a single arithmetic
// progression, and the solver recovers it in closed form.
#include <dgh/dgh.hpp>

#include <iostream>

int main() {
    const auto params = dgh::validate_params(2, 3, {{1, 1}});
    const dgh::path_spec path({2, 3});
    const std::int64_t eps = 5;

    std::cout << "Map: T(x) = (3x + 1) / 2^k, domain = positive x with x odd, 3 ∤ x\n";
    std::cout << "Question: which x ≡ " << eps << " (mod 6) have path (k1, k2) = "
              << dgh::format_path(path) << "?\n\n";

    const auto sol = dgh::solve_structure(params, path, eps);
    std::cout << "Solution: " << sol.triples().size() << " progression(s), step "
              << sol.progression_step() << " (= 6 · 2^" << sol.k_total() << ")\n";
    for (std::size_t i = 0; i < sol.triples().size(); ++i) {
        const auto& t = sol.at(i);
        std::cout << "  triple " << i << ": q=" << t.q << " r=" << t.r << " delta=" << t.delta
                  << "  =>  x = " << sol.progression_step() << "p + " << sol.member(i, 0)
                  << ",  T^2(x) = " << sol.image_step() << "p + " << sol.image(i, 0) << "\n";
    }

    std::cout << "\nFirst members and their trajectories:\n";
    for (int p = 0; p < 4; ++p) {
        const dgh::Int x = sol.member(0, p);
        const auto traj = dgh::trajectory(params, x, path.length());
        std::cout << "  p=" << p << ":";
        for (const auto& v : traj) std::cout << " " << v;
        std::cout << "   path " << dgh::format_path(dgh::path(params, x, path.length())) << "\n";
    }

    std::cout << "\nEvery intermediate iterate is an arithmetic progression too:\n";
    const auto reps = dgh::prefix_representations(sol, 0);
    for (const auto& rep : reps)
        std::cout << "  after " << rep.prefix_index << " step(s): 6·(" << rep.coefficient
                  << "p + " << rep.q << ") + " << rep.delta << "  (p=0 gives "
                  << dgh::prefix_value(params, rep, 0) << ")\n";

    const dgh::Int bound = 3 * sol.progression_step();
    const auto scanned = dgh::brute_force_members(params, path, eps, bound);
    const auto solved = dgh::enumerate_members(sol, bound);
    std::cout << "\nBrute-force scan up to " << bound << " agrees: "
              << (scanned == solved ? "yes" : "NO") << " (";
    for (std::size_t i = 0; i < scanned.size(); ++i) std::cout << (i ? ", " : "") << scanned[i];
    std::cout << ")\n";

    std::cout << "Probability of this path over the domain: exactly "
              << dgh::path_probability(params, path) << " (census: "
              << dgh::brute_force_path_probability(params, path) << ")\n";
    return 0;
}
