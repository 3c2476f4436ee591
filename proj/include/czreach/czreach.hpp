#ifndef CZREACH_CZREACH_HPP
#define CZREACH_CZREACH_HPP

#include "czreach/constrained_zonotope.hpp"
#include "czreach/enclosure.hpp"
#include "czreach/errors.hpp"
#include "czreach/expr.hpp"
#include "czreach/interval.hpp"
#include "czreach/json_io.hpp"
#include "czreach/linprog.hpp"
#include "czreach/network.hpp"
#include "czreach/reach.hpp"
#include "czreach/scenario.hpp"
#include "czreach/simulate.hpp"
#include "czreach/svg_plot.hpp"
#include "czreach/verify.hpp"

#endif
