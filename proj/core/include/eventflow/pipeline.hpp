#pragma once

#include "eventflow/event_catalog.hpp"
#include "eventflow/features.hpp"
#include "eventflow/io.hpp"
#include "eventflow/popularity.hpp"
#include "eventflow/synth.hpp"

#include <vector>

namespace eventflow {

/// Metrics for every event. An event's candidates are the posts labelled
/// for it; the top g candidates are selected first and the related ones
/// among them are scored.
std::vector<PopularityMetrics> catalog_metrics(const std::vector<Event>& events, const std::vector<Post>& posts,
                                               const std::vector<io::RelevanceLabel>& labels,
                                               const SelectionConfig& cfg);

/// Filtered events with their metrics, plus the corpus' flows, weather and
/// calendar.
FeatureInputs corpus_inputs(const SynthCorpus& corpus, const SelectionConfig& selection = {},
                            const FilterRules& rules = {});

}  // namespace eventflow
