#include "fallguard/cli.hpp"

int main(int argc, char** argv) {
    return fallguard::run_cli(argc, argv);
}
