#include "wander/experiment.hpp"

int main(int argc, char** argv) { return wander::cli::main(argc, argv); }
