#include "sgaug/cli.hpp"

int main(int argc, char** argv) { return sgaug::cli::run(argc, argv); }
