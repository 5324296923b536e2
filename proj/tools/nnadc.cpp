#include "cli.hpp"

int main(int argc, char** argv) { return nnadc::cli::run(argc, argv); }
