#pragma once

#include "telegraph/errors.hpp"
#include "telegraph/special_functions.hpp"
#include "telegraph/quadrature.hpp"
#include "telegraph/rng.hpp"
#include "telegraph/motion.hpp"
#include "telegraph/trial_schemes.hpp"
#include "telegraph/intertimes.hpp"
#include "telegraph/analytic_law.hpp"
#include "telegraph/mean_velocity.hpp"
#include "telegraph/monte_carlo.hpp"
#include "telegraph/validation.hpp"
