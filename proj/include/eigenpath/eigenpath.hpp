#pragma once

#include "eigenpath/errors.hpp"
#include "eigenpath/core_linalg.hpp"
#include "eigenpath/geometry.hpp"
#include "eigenpath/oracle.hpp"
#include "eigenpath/conditioning.hpp"
#include "eigenpath/newton.hpp"
#include "eigenpath/homotopy.hpp"
#include "eigenpath/initial_triples.hpp"
#include "eigenpath/refine.hpp"
