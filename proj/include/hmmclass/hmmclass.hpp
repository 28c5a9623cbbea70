#pragma once

#include "hmmclass/bounds.hpp"
#include "hmmclass/emission.hpp"
#include "hmmclass/errors.hpp"
#include "hmmclass/kernel.hpp"
#include "hmmclass/linalg.hpp"
#include "hmmclass/model.hpp"
#include "hmmclass/model_io.hpp"
#include "hmmclass/parallel.hpp"
#include "hmmclass/posterior.hpp"
#include "hmmclass/result_table.hpp"
#include "hmmclass/risk.hpp"
#include "hmmclass/rng.hpp"
#include "hmmclass/sequence.hpp"
#include "hmmclass/sim_table.hpp"
#include "hmmclass/transition.hpp"
#include "hmmclass/version.hpp"
