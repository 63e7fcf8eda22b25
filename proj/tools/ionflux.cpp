#include <iostream>

#include "ionflux/cli.hpp"

int main(int argc, char** argv)
{
  return ionflux::cli_dispatch(argc, argv, std::cin, std::cout, std::cerr);
}
