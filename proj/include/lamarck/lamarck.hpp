#pragma once

#include "lamarck/rng.hpp"
#include "lamarck/cppn.hpp"
#include "lamarck/brain_genotype.hpp"
#include "lamarck/genotype.hpp"
#include "lamarck/morphology.hpp"
#include "lamarck/cpg.hpp"
#include "lamarck/steering.hpp"
#include "lamarck/environment.hpp"
#include "lamarck/simulator.hpp"
#include "lamarck/revde.hpp"
#include "lamarck/parallel.hpp"
#include "lamarck/evolution.hpp"
#include "lamarck/config.hpp"
#include "lamarck/runlog.hpp"
#include "lamarck/analysis/tree_edit.hpp"
#include "lamarck/analysis/descriptors.hpp"
#include "lamarck/analysis/stats.hpp"
#include "lamarck/analysis/metrics.hpp"
#include "lamarck/analysis/plot.hpp"
