#pragma once

#include "eppmzi/analysis.hpp"
#include "eppmzi/demodulation.hpp"
#include "eppmzi/grid.hpp"
#include "eppmzi/interferogram.hpp"
#include "eppmzi/interferometer.hpp"
#include "eppmzi/io.hpp"
#include "eppmzi/media.hpp"
#include "eppmzi/spectra.hpp"
#include "eppmzi/units.hpp"
