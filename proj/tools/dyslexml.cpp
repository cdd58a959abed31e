#include <string>
#include <vector>

#include "dyslex/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return dyslex::cli::run_command(args);
}
