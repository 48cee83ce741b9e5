#pragma once

// Umbrella header.

#include "graphon_spectra/error.hpp"
#include "graphon_spectra/experiment.hpp"
#include "graphon_spectra/graphon.hpp"
#include "graphon_spectra/homdensity.hpp"
#include "graphon_spectra/io.hpp"
#include "graphon_spectra/models.hpp"
#include "graphon_spectra/parallel.hpp"
#include "graphon_spectra/qve.hpp"
#include "graphon_spectra/rng.hpp"
#include "graphon_spectra/spectra.hpp"
#include "graphon_spectra/trees.hpp"
