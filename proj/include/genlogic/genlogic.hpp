#pragma once

#include "genlogic/formula.hpp"
#include "genlogic/inference.hpp"
#include "genlogic/oracle.hpp"
#include "genlogic/rational.hpp"
#include "genlogic/worldstore.hpp"
