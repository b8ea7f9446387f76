#pragma once

// Umbrella header.

#include "ergomax/errors.hpp"
#include "ergomax/fft.hpp"
#include "ergomax/frequency.hpp"
#include "ergomax/harness.hpp"
#include "ergomax/io.hpp"
#include "ergomax/kernels.hpp"
#include "ergomax/maxnorm.hpp"
#include "ergomax/opseq.hpp"
#include "ergomax/primes.hpp"
#include "ergomax/random.hpp"
#include "ergomax/rational.hpp"
#include "ergomax/sampling.hpp"
#include "ergomax/threads.hpp"
