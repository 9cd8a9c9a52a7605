#include "adlkit/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return adlkit::cli::main_entry(argc, argv, std::cout, std::cerr);
}
