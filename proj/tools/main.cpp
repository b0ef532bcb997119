#include "bhv/cli.hpp"

int main(int argc, char** argv) {
    return bhv::run_cli(argc, argv);
}
