#include "eventflow/pipeline.hpp"

#include "eventflow/error.hpp"

#include <fmt/format.h>

#include <map>
#include <string>

namespace eventflow {

std::vector<PopularityMetrics> catalog_metrics(const std::vector<Event>& events, const std::vector<Post>& posts,
                                               const std::vector<io::RelevanceLabel>& labels,
                                               const SelectionConfig& cfg) {
    cfg.validate();
    std::map<std::string, const Post*> by_id;
    for (const auto& post : posts) by_id.emplace(post.post_id, &post);
    std::map<std::string, std::vector<const io::RelevanceLabel*>> by_event;
    for (const auto& label : labels) by_event[label.event_id].push_back(&label);

    std::vector<PopularityMetrics> out;
    out.reserve(events.size());
    for (const auto& event : events) {
        std::vector<Post> candidates;
        std::map<std::string, bool> related;
        for (const auto* label : by_event[event.event_id]) {
            const auto it = by_id.find(label->post_id);
            if (it == by_id.end()) {
                throw SchemaMismatch(fmt::format("relevance label references unknown post {}", label->post_id));
            }
            candidates.push_back(*it->second);
            related[label->post_id] = label->related;
        }
        std::vector<Post> kept;
        for (auto& post : select_top_posts(std::move(candidates), cfg)) {
            if (related[post.post_id]) kept.push_back(std::move(post));
        }
        out.push_back(compute_metrics(event, kept, cfg));
    }
    return out;
}

FeatureInputs corpus_inputs(const SynthCorpus& corpus, const SelectionConfig& selection, const FilterRules& rules) {
    FeatureInputs inputs;
    inputs.flows = corpus.flows;
    inputs.weather = corpus.weather;
    inputs.calendar = corpus.calendar;
    inputs.events = filter_events(corpus.events, rules);
    inputs.metrics = catalog_metrics(inputs.events, corpus.posts, corpus.relevance, selection);
    return inputs;
}

}  // namespace eventflow
