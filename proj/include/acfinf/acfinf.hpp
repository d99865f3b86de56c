#pragma once

#include "acfinf/asymptotics.hpp"
#include "acfinf/bootstrap.hpp"
#include "acfinf/correlation_tests.hpp"
#include "acfinf/csv.hpp"
#include "acfinf/dependence.hpp"
#include "acfinf/error.hpp"
#include "acfinf/estimators.hpp"
#include "acfinf/harness.hpp"
#include "acfinf/models.hpp"
#include "acfinf/parallel.hpp"
#include "acfinf/rng.hpp"
#include "acfinf/time_series.hpp"
