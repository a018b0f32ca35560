#include "rgml/experiment.hpp"

int main(int argc, char** argv) { return rgml::run_cli(argc, argv); }
