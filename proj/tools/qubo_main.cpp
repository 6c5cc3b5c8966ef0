#include "qubo/cli.hpp"

int main(int argc, char** argv) { return qubo::cli::run(argc, argv); }
