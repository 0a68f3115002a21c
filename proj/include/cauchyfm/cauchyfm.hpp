#pragma once

#include "cauchyfm/errors.hpp"
#include "cauchyfm/geometry.hpp"
#include "cauchyfm/potential_kernels.hpp"
#include "cauchyfm/nystrom.hpp"
#include "cauchyfm/forward_solver.hpp"
#include "cauchyfm/spectral_inversion.hpp"
#include "cauchyfm/shape_newton.hpp"
#include "cauchyfm/oracles.hpp"
#include "cauchyfm/config.hpp"
#include "cauchyfm/io.hpp"
#include "cauchyfm/pipeline.hpp"
