#pragma once

#include "netcast/errors.hpp"
#include "netcast/csv.hpp"
#include "netcast/panel.hpp"
#include "netcast/covariates.hpp"
#include "netcast/endogenous_features.hpp"
#include "netcast/latent/walktrap.hpp"
#include "netcast/latent/mmsbm.hpp"
#include "netcast/latent/latent_space.hpp"
#include "netcast/latent/structure.hpp"
#include "netcast/design.hpp"
#include "netcast/learners/model.hpp"
#include "netcast/learners/logit.hpp"
#include "netcast/learners/elastic_net.hpp"
#include "netcast/learners/logitboost.hpp"
#include "netcast/learners/neural_net.hpp"
#include "netcast/learners/tune.hpp"
#include "netcast/evaluation/metrics.hpp"
#include "netcast/evaluation/bootstrap.hpp"
#include "netcast/evaluation/diagnostics.hpp"
#include "netcast/harness/config.hpp"
#include "netcast/harness/synthetic.hpp"
#include "netcast/harness/experiment.hpp"
#include "netcast/harness/summarize.hpp"
