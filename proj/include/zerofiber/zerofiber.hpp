#pragma once

#include "zerofiber/error.hpp"
#include "zerofiber/rational.hpp"
#include "zerofiber/linalg.hpp"
#include "zerofiber/model.hpp"
#include "zerofiber/intersection.hpp"
#include "zerofiber/surface.hpp"
#include "zerofiber/solver.hpp"
#include "zerofiber/io.hpp"
#include "zerofiber/verification.hpp"
