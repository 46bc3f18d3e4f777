#pragma once

#include "elasticflow/admissibility.hpp"
#include "elasticflow/banded.hpp"
#include "elasticflow/boundary.hpp"
#include "elasticflow/curves.hpp"
#include "elasticflow/diagnostics.hpp"
#include "elasticflow/dual.hpp"
#include "elasticflow/elastica.hpp"
#include "elasticflow/energy.hpp"
#include "elasticflow/flow.hpp"
#include "elasticflow/geometry.hpp"
#include "elasticflow/io.hpp"
#include "elasticflow/mms.hpp"
#include "elasticflow/simulation.hpp"
#include "elasticflow/stencils.hpp"
#include "elasticflow/types.hpp"
