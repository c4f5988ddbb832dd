#include "afshape/cli.hpp"

int main(int argc, char** argv) { return afshape::cli_main(argc, argv); }
