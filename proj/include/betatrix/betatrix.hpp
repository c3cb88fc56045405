#pragma once

#include "betatrix/closed_forms.hpp"
#include "betatrix/ensembles.hpp"
#include "betatrix/error.hpp"
#include "betatrix/io.hpp"
#include "betatrix/matrix.hpp"
#include "betatrix/montecarlo.hpp"
#include "betatrix/oracles.hpp"
#include "betatrix/quadrature.hpp"
#include "betatrix/random.hpp"
#include "betatrix/rational.hpp"
#include "betatrix/spectral.hpp"
#include "betatrix/stats.hpp"
#include "betatrix/symbolic.hpp"
#include "betatrix/verify.hpp"
#include "betatrix/version.hpp"
