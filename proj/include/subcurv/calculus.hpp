#pragma once

#include "subcurv/calculus/differentiate.hpp"
#include "subcurv/calculus/errors.hpp"
#include "subcurv/calculus/expr.hpp"
#include "subcurv/calculus/number.hpp"
#include "subcurv/calculus/parse.hpp"
#include "subcurv/calculus/tape.hpp"
