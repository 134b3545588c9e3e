#include "nvw/cli.hpp"

int main(int argc, char** argv) { return nvw::cli_main(argc, argv); }
