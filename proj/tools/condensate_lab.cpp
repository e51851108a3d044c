#include "condensate/cli.hpp"

int main(int argc, char** argv) { return condensate::cli_main(argc, argv); }
