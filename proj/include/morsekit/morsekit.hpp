#pragma once
#include "morsekit/error.hpp"
#include "morsekit/fdm.hpp"
#include "morsekit/linalg.hpp"
#include "morsekit/nhd.hpp"
#include "morsekit/parallel.hpp"
#include "morsekit/polys.hpp"
#include "morsekit/potential.hpp"
#include "morsekit/pps.hpp"
#include "morsekit/spectrum.hpp"
#include "morsekit/sym_tridiag.hpp"
#include "morsekit/tra.hpp"
#include "morsekit/wavefunction.hpp"
