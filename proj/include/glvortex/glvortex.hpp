#pragma once

#include "glvortex/error.hpp"
#include "glvortex/potential.hpp"
#include "glvortex/radial_grid.hpp"
#include "glvortex/radial_energy.hpp"
#include "glvortex/nonescaping.hpp"
#include "glvortex/spectral.hpp"
#include "glvortex/forms.hpp"
#include "glvortex/escaping.hpp"
#include "glvortex/harmonic.hpp"
#include "glvortex/field_oracle.hpp"
#include "glvortex/cli.hpp"
