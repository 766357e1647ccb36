#include "cli.hpp"

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
  std::map<std::string, std::string> env;
  for (const char* name : {"FSCAP_WORKERS", "FSCAP_BUDGET"}) {
    if (const char* v = std::getenv(name)) env[name] = v;
  }
  return fscap::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr, env);
}
