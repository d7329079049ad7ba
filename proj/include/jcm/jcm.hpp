#pragma once

#include "jcm/error.hpp"
#include "jcm/linalg.hpp"
#include "jcm/states.hpp"
#include "jcm/dynamics.hpp"
#include "jcm/entropy.hpp"
#include "jcm/entanglement.hpp"
#include "jcm/trajectory.hpp"
#include "jcm/sweep.hpp"
