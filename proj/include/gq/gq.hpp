// Umbrella header.
#pragma once

#include "gq/bohr_sommerfeld.hpp"
#include "gq/circle_action.hpp"
#include "gq/forms.hpp"
#include "gq/io.hpp"
#include "gq/model.hpp"
#include "gq/numerics.hpp"
#include "gq/polytope.hpp"
#include "gq/quantisation.hpp"
#include "gq/verify.hpp"
