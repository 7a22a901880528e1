#pragma once

#include "subcurv/smp/graph_model.hpp"
#include "subcurv/smp/harness.hpp"
#include "subcurv/smp/integrate.hpp"
#include "subcurv/smp/registry.hpp"
#include "subcurv/smp/report.hpp"
#include "subcurv/smp/scenario.hpp"
