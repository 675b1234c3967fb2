// Convenience umbrella: the whole library.
#pragma once

#include "flowmap/bench.hpp"
#include "flowmap/dist.hpp"
#include "flowmap/exact.hpp"
#include "flowmap/gen.hpp"
#include "flowmap/json.hpp"
#include "flowmap/model.hpp"
#include "flowmap/oracle.hpp"
#include "flowmap/policy.hpp"
#include "flowmap/verify.hpp"
