#include "ma/cli.hpp"

int main(int argc, char** argv) { return ma::run(argc, argv); }
