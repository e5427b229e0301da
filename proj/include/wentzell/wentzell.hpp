#pragma once

#include "wentzell/banded.hpp"
#include "wentzell/config.hpp"
#include "wentzell/discretize.hpp"
#include "wentzell/errors.hpp"
#include "wentzell/grid.hpp"
#include "wentzell/integrate.hpp"
#include "wentzell/lyapunov.hpp"
#include "wentzell/model.hpp"
#include "wentzell/quadrature.hpp"
#include "wentzell/random_fields.hpp"
#include "wentzell/run.hpp"
#include "wentzell/samples.hpp"
#include "wentzell/wellposed.hpp"
