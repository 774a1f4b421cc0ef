#pragma once

#include "indicatrix/dyadic.hpp"
#include "indicatrix/errors.hpp"
#include "indicatrix/exhaustion.hpp"
#include "indicatrix/io.hpp"
#include "indicatrix/metric_space.hpp"
#include "indicatrix/multiplicity.hpp"
#include "indicatrix/rng.hpp"
#include "indicatrix/variation.hpp"
