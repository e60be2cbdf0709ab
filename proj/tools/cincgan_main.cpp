// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "cincgan/cli.hpp"

int main(int argc, char** argv) { return cincgan::cli::run(argc, argv); }
