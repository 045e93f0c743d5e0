#include "cli.hpp"

int main(int argc, char** argv) { return skyroute::cli::run(argc, argv); }
