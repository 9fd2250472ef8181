#pragma once

#include "sccdma/coupling.hpp"
#include "sccdma/de.hpp"
#include "sccdma/errors.hpp"
#include "sccdma/graph_io.hpp"
#include "sccdma/mmse.hpp"
#include "sccdma/random.hpp"
#include "sccdma/reports.hpp"
#include "sccdma/search.hpp"
#include "sccdma/threshold.hpp"
