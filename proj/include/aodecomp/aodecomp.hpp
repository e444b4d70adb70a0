#pragma once

#include "aodecomp/tolerances.hpp"
#include "aodecomp/core.hpp"
#include "aodecomp/linear.hpp"
#include "aodecomp/system.hpp"
#include "aodecomp/field.hpp"
#include "aodecomp/dissipation.hpp"
#include "aodecomp/catalog.hpp"
#include "aodecomp/dynamics.hpp"
#include "aodecomp/io.hpp"
