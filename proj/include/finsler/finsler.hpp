#pragma once

#include "finsler/linalg.hpp"
#include "finsler/dual.hpp"
#include "finsler/jets.hpp"
#include "finsler/expr.hpp"
#include "finsler/metrics.hpp"
#include "finsler/connection.hpp"
#include "finsler/transport.hpp"
#include "finsler/circles.hpp"
#include "finsler/conformal.hpp"
#include "finsler/metric_spec.hpp"
#include "finsler/io.hpp"
