#pragma once

#include "pellsos/christoffel.hpp"
#include "pellsos/dense.hpp"
#include "pellsos/errors.hpp"
#include "pellsos/literal.hpp"
#include "pellsos/maxdet.hpp"
#include "pellsos/measures.hpp"
#include "pellsos/moments.hpp"
#include "pellsos/multi_index.hpp"
#include "pellsos/pell.hpp"
#include "pellsos/poly.hpp"
#include "pellsos/report.hpp"
#include "pellsos/scalar.hpp"
#include "pellsos/sets.hpp"
