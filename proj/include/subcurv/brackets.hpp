#pragma once

#include "subcurv/brackets/brackets.hpp"
