#pragma once

// Umbrella header: table trees and parsers, TEDS scoring, rule-based rewards,
// group-relative optimization kernels, dataset construction, and the
// Bernoulli reward-variance simulator.

#include "tablerl/dataset.hpp"
#include "tablerl/errors.hpp"
#include "tablerl/grpo.hpp"
#include "tablerl/hint_completion.hpp"
#include "tablerl/levenshtein.hpp"
#include "tablerl/reward.hpp"
#include "tablerl/rng.hpp"
#include "tablerl/simulator.hpp"
#include "tablerl/table_model.hpp"
#include "tablerl/table_parsing.hpp"
#include "tablerl/teds.hpp"
#include "tablerl/text.hpp"
