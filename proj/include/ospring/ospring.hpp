#pragma once

#include "ospring/constants.hpp"
#include "ospring/error.hpp"
#include "ospring/two_port.hpp"
#include "ospring/transfer_optics.hpp"
#include "ospring/zero_crossings.hpp"
#include "ospring/cavity_model.hpp"
#include "ospring/parallel.hpp"
#include "ospring/noise_spectra.hpp"
#include "ospring/backaction.hpp"
#include "ospring/polynomial.hpp"
#include "ospring/stability.hpp"
#include "ospring/run_config.hpp"
