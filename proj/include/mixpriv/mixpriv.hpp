#pragma once

#include "mixpriv/attacks.hpp"
#include "mixpriv/error.hpp"
#include "mixpriv/image.hpp"
#include "mixpriv/lambda.hpp"
#include "mixpriv/metrics.hpp"
#include "mixpriv/obfuscate.hpp"
#include "mixpriv/pipeline.hpp"
#include "mixpriv/png_io.hpp"
#include "mixpriv/raster.hpp"
#include "mixpriv/rng.hpp"
#include "mixpriv/thresholds.hpp"
