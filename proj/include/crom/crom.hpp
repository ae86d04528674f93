#pragma once

// Umbrella header.

#include "crom/basis.hpp"
#include "crom/causation.hpp"
#include "crom/config.hpp"
#include "crom/diagnostics.hpp"
#include "crom/enkbf.hpp"
#include "crom/errors.hpp"
#include "crom/fft.hpp"
#include "crom/io.hpp"
#include "crom/kse.hpp"
#include "crom/library.hpp"
#include "crom/mle.hpp"
#include "crom/model.hpp"
#include "crom/parallel.hpp"
#include "crom/rng.hpp"
#include "crom/svg.hpp"
