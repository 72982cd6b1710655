#include "dpistab/cli.hpp"

int main(int argc, char** argv) { return dpistab::cli::run(argc, argv); }
