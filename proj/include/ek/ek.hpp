#pragma once

#include "ek/eklerch.hpp"
#include "ek/lattice.hpp"
#include "ek/numeric.hpp"
#include "ek/padic.hpp"
#include "ek/padic_series.hpp"
#include "ek/report.hpp"
#include "ek/series.hpp"
#include "ek/verify.hpp"
#include "ek/weierstrass.hpp"
