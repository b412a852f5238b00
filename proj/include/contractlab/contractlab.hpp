#pragma once

#include "contractlab/cml.hpp"
#include "contractlab/contractivity.hpp"
#include "contractlab/error.hpp"
#include "contractlab/fixtures.hpp"
#include "contractlab/graphs.hpp"
#include "contractlab/linalg.hpp"
#include "contractlab/matrix.hpp"
#include "contractlab/products.hpp"
#include "contractlab/projections.hpp"
#include "contractlab/random.hpp"
