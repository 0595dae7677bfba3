#include <string>
#include <vector>

#include "zeta_chaos/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return zeta_chaos::cli::run(args);
}
