#pragma once

// Core data model and parsing
#include "cityometrics/affiliation.hpp"
#include "cityometrics/corpus.hpp"

// Registries and resolution
#include "cityometrics/gazetteer.hpp"

// Metropolitan-area construction
#include "cityometrics/delineation.hpp"

// Counting regimes and collaboration matrices
#include "cityometrics/collab.hpp"
#include "cityometrics/counting.hpp"

// Analysis tables
#include "cityometrics/report.hpp"

// Synthetic corpora
#include "cityometrics/fixtures.hpp"

// Batch commands and run files
#include "cityometrics/commands.hpp"
#include "cityometrics/runconfig.hpp"
