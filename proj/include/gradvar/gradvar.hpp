#pragma once

#include "baselines.hpp"
#include "domain.hpp"
#include "error.hpp"
#include "field.hpp"
#include "gvf.hpp"
#include "io.hpp"
#include "mesh_io.hpp"
#include "metrics.hpp"
#include "render.hpp"
#include "smoothing.hpp"
