#include "openmind/pipeline.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return openmind::pipeline::run_cli(argc, argv, std::cout, std::cerr);
}
