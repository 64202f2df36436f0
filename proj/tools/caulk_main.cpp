#include <string>
#include <vector>

#include "caulk/commands.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return caulk::run_cli(args);
}
