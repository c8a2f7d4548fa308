#include "ospring/app.hpp"

int main(int argc, char** argv) { return ospring::app::run(argc, argv); }
