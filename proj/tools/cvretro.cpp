#include "cvretro/cli.hpp"

int main(int argc, char** argv) { return cvretro::cli::main_entry(argc, argv); }
