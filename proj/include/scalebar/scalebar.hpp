#pragma once

#include "rational.hpp"
#include "weights.hpp"
#include "exact.hpp"
#include "constructions.hpp"
#include "geometry.hpp"
#include "capacity.hpp"
#include "tensor.hpp"
