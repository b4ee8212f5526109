#pragma once

#include "rankcsp/constraint_system.hpp"
#include "rankcsp/cost.hpp"
#include "rankcsp/error.hpp"
#include "rankcsp/fas.hpp"
#include "rankcsp/instances.hpp"
#include "rankcsp/oracle.hpp"
#include "rankcsp/pipeline.hpp"
#include "rankcsp/random.hpp"
#include "rankcsp/rational.hpp"
#include "rankcsp/ranking.hpp"
