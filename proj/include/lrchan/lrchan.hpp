#pragma once

/*! \file lrchan.hpp
 *  \brief Umbrella header. */

#include "amplify.hpp"
#include "channel.hpp"
#include "constructions.hpp"
#include "dist.hpp"
#include "errors.hpp"
#include "functionality.hpp"
#include "json_io.hpp"
#include "scalar.hpp"
#include "sweep.hpp"
#include "tokens.hpp"
#include "truth_table.hpp"
