#include "wcpd/cli.hpp"

#include <iostream>

int main(int argc, char **argv)
{
  std::vector<std::string> args(argv + 1, argv + argc);
  return wcpd::cli::run(std::move(args), std::cout, std::cerr);
}
