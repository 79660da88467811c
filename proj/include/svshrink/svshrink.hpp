#pragma once

#include "svshrink/amse.hpp"
#include "svshrink/checks.hpp"
#include "svshrink/denoise.hpp"
#include "svshrink/errors.hpp"
#include "svshrink/experiments.hpp"
#include "svshrink/io.hpp"
#include "svshrink/mp_law.hpp"
#include "svshrink/rules.hpp"
#include "svshrink/tables.hpp"
#include "svshrink/thresholds.hpp"
