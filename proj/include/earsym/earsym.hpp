#pragma once

// Umbrella header for the ear-symmetry evaluation toolkit.

#include "earsym/csv.hpp"
#include "earsym/embedding.hpp"
#include "earsym/error.hpp"
#include "earsym/geometry.hpp"
#include "earsym/image.hpp"
#include "earsym/manifest.hpp"
#include "earsym/metrics.hpp"
#include "earsym/pgm.hpp"
#include "earsym/protocol.hpp"
#include "earsym/report.hpp"
#include "earsym/rng.hpp"
#include "earsym/side.hpp"
#include "earsym/store.hpp"
#include "earsym/synth.hpp"
