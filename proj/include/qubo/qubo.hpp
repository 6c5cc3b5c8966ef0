#pragma once

#include "qubo/errors.hpp"
#include "qubo/flip_gains.hpp"
#include "qubo/harness.hpp"
#include "qubo/instance.hpp"
#include "qubo/instances.hpp"
#include "qubo/landscape.hpp"
#include "qubo/report_json.hpp"
#include "qubo/solver.hpp"
#include "qubo/spectral.hpp"
#include "qubo/version.hpp"
