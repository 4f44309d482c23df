#pragma once

// Umbrella header.

#include "affine.hpp"
#include "ascii_grid.hpp"
#include "config.hpp"
#include "csv.hpp"
#include "economics.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "geotiff.hpp"
#include "mask.hpp"
#include "pipeline.hpp"
#include "raster.hpp"
#include "raster_io.hpp"
#include "regions.hpp"
#include "report.hpp"
#include "stage1.hpp"
#include "stage2.hpp"
