#include "commands.hpp"

int main(int argc, char** argv) {
  return ratmax::cli::run({argv + 1, argv + argc});
}
