#include "cli.hpp"

int main(int argc, char** argv) { return flagdyn::cli::main_entry(argc, argv); }
