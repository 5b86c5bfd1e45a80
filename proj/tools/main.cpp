#include "accel/harness.hpp"

int main(int argc, char **argv) { return accel::cli_main(argc, argv); }
