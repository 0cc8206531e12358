#include "commands.hpp"

int main(int argc, char** argv) { return greybox::cli::run(argc, argv); }
