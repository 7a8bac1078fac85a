#pragma once

#include "trapkohn/error.hpp"
#include "trapkohn/frequency.hpp"
#include "trapkohn/geometry.hpp"
#include "trapkohn/model.hpp"
#include "trapkohn/quadrature.hpp"
#include "trapkohn/response.hpp"
#include "trapkohn/spectral.hpp"
#include "trapkohn/oracle/bogoliubov.hpp"
#include "trapkohn/oracle/phase_field.hpp"
#include "trapkohn/oracle/timedomain.hpp"
