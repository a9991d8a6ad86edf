// Compares how well a few inner approximations of the 8x8 PSD cone reach a
// random unit-norm PSD matrix.

#include <psdcone/psdcone.hpp>

#include <cstdio>

int main() {
    using namespace psdcone;
    const Index n = 8;
    const SymMatrix target = random_psd_normalized(n, 42);

    PackingConfig cfg;
    cfg.n = n;
    cfg.s = 3;
    cfg.N = 12;
    cfg.seed = 1;
    cfg.restarts = 3;
    cfg.max_iter = 2000;
    const PackingResult packed = pack(cfg);
    std::printf("packed %zu frames of dim %d, min chordal distance %.4f\n", packed.frames.size(),
                static_cast<int>(cfg.s), packed.achieved_min_chordal);

    struct Row {
        const char* name;
        FrameSet frames;
    };
    const Row rows[] = {{"dd", dd_frames(n)},
                        {"sdd", fw_frames(n, 2)},
                        {"fw3", fw_frames(n, 3)},
                        {"packed 12x3", packed.frames}};

    for (const auto& r : rows) {
        const auto res = project_onto_cone_sum(target, ConeSum(r.frames));
        std::printf("%-12s %4zu frames  error %.3e  %s\n", r.name, r.frames.size(), res.error,
                    res.converged ? "converged" : "not converged");
    }

    const auto full = membership(target, ConeSum(fw_frames(n, n)), 1e-8);
    std::printf("full cone contains target: %s (distance %.1e)\n", full.member ? "yes" : "no", full.distance);
}
