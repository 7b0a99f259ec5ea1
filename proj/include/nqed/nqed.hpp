#pragma once

// Convenience umbrella for the library (the CLI front end is separate in
// cli_main.hpp).

#include "blockade.hpp"
#include "cli.hpp"
#include "hamiltonian.hpp"
#include "manifold.hpp"
#include "spectra.hpp"
#include "sweep.hpp"
