#include "wbc/scenario.hpp"

int main(int argc, char** argv) { return wbc::cli_main(argc, argv); }
