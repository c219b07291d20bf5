#include "qss/cli.hpp"

int main(int argc, char **argv) {
    return qss::cli::run(argc, argv);
}
