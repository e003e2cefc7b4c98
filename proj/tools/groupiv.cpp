#include "groupiv/cli.hpp"

int main(int argc, char** argv) { return groupiv::cli::run(argc, argv); }
