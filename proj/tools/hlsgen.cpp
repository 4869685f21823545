#include "hlsgen/driver.hpp"

int main(int argc, char** argv) { return hlsgen::run_cli(argc, argv); }
