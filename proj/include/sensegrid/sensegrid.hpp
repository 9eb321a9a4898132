#pragma once

#include "sensegrid/analysis.hpp"
#include "sensegrid/corpus.hpp"
#include "sensegrid/error.hpp"
#include "sensegrid/exact_matches.hpp"
#include "sensegrid/pdc.hpp"
#include "sensegrid/render_model.hpp"
#include "sensegrid/report.hpp"
#include "sensegrid/textproc.hpp"
#include "sensegrid/unique_words.hpp"
