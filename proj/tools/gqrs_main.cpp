#include "gqrs/cli.hpp"

int main(int argc, char** argv) { return gqrs::cli::main(argc, argv); }
