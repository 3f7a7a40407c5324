#include "gqn/cli.hpp"

int main(int argc, char** argv) { return gqn::cli::run(argc, argv); }
