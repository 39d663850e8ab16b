#pragma once

#include "boundary.hpp"
#include "bass_serre.hpp"
#include "cli.hpp"
#include "error.hpp"
#include "gauge.hpp"
#include "graph.hpp"
#include "graph_of_groups.hpp"
#include "group.hpp"
#include "io.hpp"
#include "kb.hpp"
#include "manifold.hpp"
#include "paths.hpp"
#include "rays.hpp"
#include "rewriting.hpp"
#include "smith.hpp"
#include "star.hpp"
#include "word.hpp"
