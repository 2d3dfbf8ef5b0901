#include "ttgs/harness.hpp"

int main(int argc, char** argv) {
  return ttgs::run_cli(argc, argv);
}
