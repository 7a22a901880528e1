#pragma once

#include "subcurv/heisenberg/group.hpp"
#include "subcurv/heisenberg/operators.hpp"
#include "subcurv/heisenberg/structures.hpp"
