#pragma once

#include "analysis.hpp"
#include "center.hpp"
#include "config.hpp"
#include "depth.hpp"
#include "error.hpp"
#include "io.hpp"
#include "kernel.hpp"
#include "log.hpp"
#include "numeric.hpp"
#include "parallel.hpp"
#include "process.hpp"
#include "rng.hpp"
#include "smoothfn.hpp"

namespace ppdepth {
inline constexpr const char* version = "0.1.0";
}
