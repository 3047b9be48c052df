#include "maskmix/harness.hpp"

int main(int argc, char** argv) { return maskmix::harness::cli(argc, argv); }
