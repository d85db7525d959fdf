#ifndef KDVEXP_KDVEXP_HPP
#define KDVEXP_KDVEXP_HPP

// Umbrella header: spectral tools, time integrators, brute-force oracles,
// experiments, and file I/O. The CLI front end (cli.hpp) is not included
// here because it pulls in CLI11.

#include "errors.hpp"
#include "experiments.hpp"
#include "field.hpp"
#include "grid.hpp"
#include "io.hpp"
#include "oracle.hpp"
#include "schemes.hpp"
#include "selftest.hpp"
#include "spectral.hpp"

#endif
