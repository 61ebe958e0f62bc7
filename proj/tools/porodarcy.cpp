#include "porodarcy/cli.hpp"

int main(int argc, char** argv) { return porodarcy::cli_main(argc, argv); }
