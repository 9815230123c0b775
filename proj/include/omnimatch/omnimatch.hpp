#pragma once

// Seeded multiple-graph matching via joint spectral embedding: omnibus
// embedding of the seed subgraphs, out-of-sample embedding of unseeded
// vertices, exact or k-NN assignment between embedded positions, and the
// downstream similarity / hypothesis-testing / clustering toolkit.

#include "omnimatch/assign.hpp"
#include "omnimatch/errors.hpp"
#include "omnimatch/graph.hpp"
#include "omnimatch/hypotest.hpp"
#include "omnimatch/io.hpp"
#include "omnimatch/metrics.hpp"
#include "omnimatch/models.hpp"
#include "omnimatch/omni.hpp"
#include "omnimatch/oos.hpp"
#include "omnimatch/parallel.hpp"
#include "omnimatch/rng.hpp"
#include "omnimatch/spectral.hpp"
#include "omnimatch/warnings.hpp"
