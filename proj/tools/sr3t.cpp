#include "sr3t/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
	return sr3t::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
