#pragma once

#include "acceptance.hpp"
#include "algebra.hpp"
#include "bundles.hpp"
#include "chain.hpp"
#include "error.hpp"
#include "gns.hpp"
#include "io.hpp"
#include "kadison.hpp"
#include "ktheory.hpp"
#include "oracle.hpp"
#include "numerics.hpp"
#include "policy.hpp"
#include "projgeom.hpp"
#include "random.hpp"
#include "spin.hpp"
