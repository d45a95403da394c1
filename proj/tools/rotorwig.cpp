#include <cstdlib>
#include <iostream>
#include <string>

#include <omp.h>

#include "orient/cli.hpp"

int main(int argc, char** argv) {
    if (const char* env = std::getenv("ORIENT_NUM_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || n < 1) {
            std::cerr << "rotorwig: configuration: ORIENT_NUM_THREADS must be a positive integer\n";
            return static_cast<int>(orient::ExitCode::usage);
        }
        omp_set_num_threads(static_cast<int>(n));
    }
    return orient::run_cli(argc, argv, std::cout, std::cerr);
}
