#pragma once

#include "epat/errors.hpp"
#include "epat/grid.hpp"
#include "epat/boundary.hpp"
#include "epat/medium.hpp"
#include "epat/trace.hpp"
#include "epat/norms.hpp"
#include "epat/wave_engine.hpp"
#include "epat/cg.hpp"
#include "epat/operators.hpp"
#include "epat/recon.hpp"
#include "epat/rays.hpp"
#include "epat/phantom.hpp"
#include "epat/setup.hpp"
#include "epat/io.hpp"
