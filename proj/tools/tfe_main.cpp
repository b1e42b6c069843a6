#include "tfe/cli.hpp"

int main(int argc, char** argv) {
    return tfe::cli::run_cli({argv + 1, argv + argc});
}
