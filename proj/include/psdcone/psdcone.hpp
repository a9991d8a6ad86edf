#pragma once

#include <psdcone/error.hpp>
#include <psdcone/rng.hpp>
#include <psdcone/symmat.hpp>
#include <psdcone/frames.hpp>
#include <psdcone/frame_set.hpp>
#include <psdcone/generators.hpp>
#include <psdcone/packing.hpp>
#include <psdcone/coneapprox.hpp>
#include <psdcone/io.hpp>
#include <psdcone/experiments.hpp>
