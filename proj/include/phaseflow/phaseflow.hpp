#pragma once

// Umbrella header for the phaseflow STFT phase-retrieval library.

#include "phaseflow/algorithms.hpp"
#include "phaseflow/errors.hpp"
#include "phaseflow/fft.hpp"
#include "phaseflow/metrics.hpp"
#include "phaseflow/online.hpp"
#include "phaseflow/projections.hpp"
#include "phaseflow/spec_file.hpp"
#include "phaseflow/stft.hpp"
#include "phaseflow/synth.hpp"
#include "phaseflow/text.hpp"
#include "phaseflow/wav_io.hpp"
