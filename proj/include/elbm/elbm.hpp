#pragma once

#include "elbm/boundary.hpp"
#include "elbm/core.hpp"
#include "elbm/grid.hpp"
#include "elbm/initcond.hpp"
#include "elbm/io.hpp"
#include "elbm/kernel.hpp"
#include "elbm/material.hpp"
#include "elbm/mms.hpp"
#include "elbm/parallel.hpp"
#include "elbm/postprocess.hpp"
#include "elbm/runner.hpp"
#include "elbm/smallmat.hpp"
#include "elbm/solver.hpp"
#include "elbm/stabmon.hpp"
#include "elbm/verify.hpp"
#include "elbm/version.hpp"
