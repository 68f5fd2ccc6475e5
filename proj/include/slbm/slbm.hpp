#pragma once

#include "slbm/enumeration.hpp"
#include "slbm/error.hpp"
#include "slbm/geometry_io.hpp"
#include "slbm/kernels.hpp"
#include "slbm/lattice_model.hpp"
#include "slbm/partition.hpp"
#include "slbm/perfmodel.hpp"
#include "slbm/sparse_lattice.hpp"
#include "slbm/trt.hpp"
#include "slbm/variant.hpp"
#include "slbm/worker_pool.hpp"
