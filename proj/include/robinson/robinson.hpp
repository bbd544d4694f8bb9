#pragma once

// Everything in one include.

#include "robinson/errors.hpp"
#include "robinson/jet.hpp"
#include "robinson/exprjet.hpp"
#include "robinson/pointalg.hpp"
#include "robinson/fields.hpp"
#include "robinson/curvature.hpp"
#include "robinson/algclass.hpp"
#include "robinson/optics.hpp"
#include "robinson/cr.hpp"
#include "robinson/kerrtwistor.hpp"
#include "robinson/model.hpp"
#include "robinson/catalog.hpp"
