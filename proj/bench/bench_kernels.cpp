// Compares the serial reference kernels against the OpenMP ones on the
// sizes the mixnet actually sees: whole columns raised to a server
// exponent, batched key-proof checks, and membership screens. Run with
// OMP_NUM_THREADS set to taste.

#include <chrono>
#include <iostream>
#include <omp.h>

#include "crex/kernels.hpp"

using namespace crex;
using clock_type = std::chrono::steady_clock;

namespace {

double ms_since(clock_type::time_point start) {
    return std::chrono::duration<double, std::milli>(clock_type::now() - start).count();
}

template <typename Fn>
double best_of(int reps, Fn fn) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        auto t0 = clock_type::now();
        fn();
        double t = ms_since(t0);
        if (t < best)
            best = t;
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    std::string group_id = argc > 1 ? argv[1] : "modp2048";
    GroupParams gp = GroupParams::preset(group_id);
    RandomSource rng(1234);

    std::cout << "group " << gp.id << ", " << omp_get_max_threads() << " omp thread(s)\n";
    std::cout << "kernel                n      serial ms    parallel ms   speedup   equal\n";

    const int reps = group_id == "modp2048" ? 3 : 10;
    for (std::size_t n : {64u, 256u, 1024u}) {
        std::vector<GroupElement> bases;
        std::vector<Scalar> exps;
        std::vector<DlogProof> proofs;
        std::vector<GroupElement> keys;
        Bytes ctx = to_bytes("bench");
        for (std::size_t i = 0; i < n; ++i) {
            KeyPair k = keygen(gp, rng);
            bases.push_back(k.pk);
            exps.push_back(Scalar::random_nonzero(gp, rng));
            keys.push_back(k.pk);
            proofs.push_back(dlog_prove(gp, k.sk, generator(gp), ctx, rng));
        }
        Scalar e = Scalar::random_nonzero(gp, rng);

        std::vector<GroupElement> out_s, out_p;
        double ts = best_of(reps, [&] { out_s = serial::pow_batch(bases, e, gp); });
        double tp = best_of(reps, [&] { out_p = parallel::pow_batch(bases, e, gp); });
        std::printf("pow_batch        %6zu   %10.2f   %10.2f   %7.2fx   %s\n", n, ts, tp,
                    ts / tp, out_s == out_p ? "yes" : "NO");

        std::vector<std::uint8_t> ok_s, ok_p;
        ts = best_of(reps, [&] { ok_s = serial::verify_dlog_batch(keys, proofs, generator(gp), ctx, gp); });
        tp = best_of(reps, [&] { ok_p = parallel::verify_dlog_batch(keys, proofs, generator(gp), ctx, gp); });
        std::printf("verify_dlog      %6zu   %10.2f   %10.2f   %7.2fx   %s\n", n, ts, tp,
                    ts / tp, ok_s == ok_p ? "yes" : "NO");

        std::optional<std::size_t> m_s, m_p;
        ts = best_of(reps, [&] { m_s = serial::first_non_member(bases, gp); });
        tp = best_of(reps, [&] { m_p = parallel::first_non_member(bases, gp); });
        std::printf("member_screen    %6zu   %10.2f   %10.2f   %7.2fx   %s\n", n, ts, tp,
                    ts / tp, m_s == m_p ? "yes" : "NO");
    }
    return 0;
}
