#pragma once

#include "geodet/errors.hpp"
#include "geodet/quadrature.hpp"
#include "geodet/interval_spectrum.hpp"
#include "geodet/model_geometry.hpp"
#include "geodet/extrapolation.hpp"
#include "geodet/gelfand_yaglom.hpp"
#include "geodet/fredholm_galerkin.hpp"
#include "geodet/heat_asymptotics.hpp"
#include "geodet/validation.hpp"
#include "geodet/report.hpp"
