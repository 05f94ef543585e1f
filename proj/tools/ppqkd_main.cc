#include <iostream>

#include "ppqkd/cli.h"

int main(int argc, char **argv) {
    return ppqkd::run_cli(argc, argv, std::cout, std::cerr);
}
