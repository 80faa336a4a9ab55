#pragma once

#include "vesicle/version.hpp"
#include "vesicle/errors.hpp"
#include "vesicle/grid.hpp"
#include "vesicle/fft.hpp"
#include "vesicle/spectral.hpp"
#include "vesicle/model.hpp"
#include "vesicle/schemes.hpp"
#include "vesicle/driver.hpp"
#include "vesicle/scenario.hpp"
#include "vesicle/oracles.hpp"
#include "vesicle/io.hpp"
#include "vesicle/config.hpp"
