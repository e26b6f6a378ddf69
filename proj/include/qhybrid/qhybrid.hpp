#pragma once

#include <qhybrid/branch.hpp>
#include <qhybrid/errors.hpp>
#include <qhybrid/geometry.hpp>
#include <qhybrid/greens.hpp>
#include <qhybrid/matrix2.hpp>
#include <qhybrid/parallel.hpp>
#include <qhybrid/qkrein.hpp>
#include <qhybrid/quadrature.hpp>
#include <qhybrid/resonance.hpp>
#include <qhybrid/roots.hpp>
#include <qhybrid/scattering.hpp>
#include <qhybrid/specfun.hpp>
#include <qhybrid/spectra.hpp>
#include <qhybrid/wide.hpp>
