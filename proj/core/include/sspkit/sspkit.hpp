#pragma once

#include "sspkit/envelope.hpp"
#include "sspkit/errors.hpp"
#include "sspkit/io.hpp"
#include "sspkit/mechanism.hpp"
#include "sspkit/objective.hpp"
#include "sspkit/payoff_model.hpp"
#include "sspkit/quadrature.hpp"
#include "sspkit/strictifier.hpp"
#include "sspkit/verifier.hpp"
#include "sspkit/version.hpp"
