#include "jeffreys_cli.hpp"

int main(int argc, char** argv) { return jeffreys::cli::run(argc, argv); }
