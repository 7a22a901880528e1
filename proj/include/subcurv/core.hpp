#pragma once

#include "subcurv/core/curvature.hpp"
#include "subcurv/core/singular.hpp"
#include "subcurv/core/structure.hpp"
