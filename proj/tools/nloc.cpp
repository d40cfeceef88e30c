#include "nloc/cli.hpp"

int main(int argc, char** argv) { return nloc::cli::run_command({argv + 1, argv + argc}); }
