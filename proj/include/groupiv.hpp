#pragma once

#include "groupiv/analysis.hpp"
#include "groupiv/config.hpp"
#include "groupiv/csv.hpp"
#include "groupiv/ensemble.hpp"
#include "groupiv/error.hpp"
#include "groupiv/io.hpp"
#include "groupiv/levels.hpp"
#include "groupiv/lm.hpp"
#include "groupiv/peaks.hpp"
#include "groupiv/report.hpp"
#include "groupiv/rng.hpp"
#include "groupiv/spectrum.hpp"
#include "groupiv/svg.hpp"
#include "groupiv/toml_lite.hpp"
#include "groupiv/units.hpp"
#include "groupiv/vibmodel.hpp"
