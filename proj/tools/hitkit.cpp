#include "hitkit/cli.hpp"

int main(int argc, char** argv) { return hitkit::cli::run(argc, argv); }
