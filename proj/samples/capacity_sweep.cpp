// Asymptotic capacity of a few receivers versus the power budget.
//
//   sample_capacity [n_r]
//
// Prints CSV: channel, P, lambda*, JF(lambda*), capacity in bits.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include "jcap/jcap.hpp"

int main(int argc, char** argv) {
    const double nr = argc > 1 ? std::atof(argv[1]) : 100.0;
    const double A = 2.0;
    const std::vector<std::pair<std::string, jcap::Channel>> channels{
        {"awgn", jcap::Channel::awgn(A)},
        {"clipped B=A/2", jcap::Channel::clipped_awgn(A, 0.5 * A)},
        {"1-bit", jcap::Channel::one_bit(A)},
        {"4-level ADC", jcap::Channel::uniform_adc(A, 4)},
        {"dithered 1-bit N=3", jcap::Channel::dithered_1bit(A, jcap::DitherSet::uniform(3, A))},
    };
    std::printf("channel,P [power],lambda_star [bits/power],JF,capacity [bits]\n");
    for (const auto& [name, ch] : channels) {
        for (double P : {0.05, 0.2, 0.5, 1.0, A * A / 3.0}) {
            const auto sol = jcap::solve_lambda_star(ch, P);
            std::printf("%s,%.6g,%.9g,%.9g,%.9g\n", name.c_str(), P, sol.lambda_star, sol.jf,
                        sol.capacity_bits(nr));
        }
    }
}
