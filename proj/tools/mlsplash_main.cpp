/******************************************************************************
 *
 * mlsplash - data-driven splash modeling for FLIP liquid simulations
 * Copyright 2026 the mlsplash authors
 *
 * This program is free software, distributed under the terms of the
 * Apache License, Version 2.0
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Command-line entry point
 *
 ******************************************************************************/

#include <cstdio>

int main() {
  std::puts("mlsplash: CLI under construction");
  return 0;
}
