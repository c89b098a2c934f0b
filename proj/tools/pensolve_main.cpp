#include <string>
#include <vector>

#include "pensolve/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return pensolve::cli::run(std::move(args));
}
