#include "cli.hpp"

int main(int argc, char** argv) { return ispu::cli::run(argc, argv); }
