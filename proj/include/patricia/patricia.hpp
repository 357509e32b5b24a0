#pragma once

// Everything: words and source measures, radix/patricia trees, the backward
// kernels and growth chains, didendritic systems, infinite bridges, and the
// statistics layer.

#include "patricia/bridges.hpp"
#include "patricia/cli.hpp"
#include "patricia/dds.hpp"
#include "patricia/errors.hpp"
#include "patricia/kernels.hpp"
#include "patricia/labeled_tree.hpp"
#include "patricia/measure.hpp"
#include "patricia/rational.hpp"
#include "patricia/rng.hpp"
#include "patricia/serialize.hpp"
#include "patricia/stats.hpp"
#include "patricia/tree.hpp"
#include "patricia/word.hpp"
