#include "nurse_boa/cli.hpp"

int main(int argc, char** argv) { return nurse_boa::cli::run(argc, argv); }
