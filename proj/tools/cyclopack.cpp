#include <exception>
#include <iostream>

#include "cyclopack/cli.hpp"

int main(int argc, char** argv) {
  try {
    return cyclopack::cli::run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << "\n";
    return 1;
  }
}
