#include "cli.hpp"

int main(int argc, char** argv) { return metatag::cli::run(argc, argv); }
