#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace eventflow {

enum class TemplateId { P1_time, P2_summary, P3_classify, P4_relevance };

using Bindings = std::map<std::string, std::string, std::less<>>;

struct PromptTemplate {
    TemplateId id;
    std::string_view body;  ///< placeholders are written as {name}

    /// Placeholder names in order of first appearance.
    std::vector<std::string> placeholders() const;
};

const PromptTemplate& prompt_template(TemplateId id);
std::string_view to_string(TemplateId id);

/// Substitutes every placeholder in one pass. Binding values are inserted
/// verbatim and never re-scanned. Throws MissingBinding naming every
/// unbound placeholder.
std::string render(TemplateId id, const Bindings& bindings);

/// Inverse of render: recovers the bindings from a rendered prompt by
/// locating the template's literal segments in order. Returns nullopt when
/// the text was not produced by this template.
std::optional<Bindings> match(TemplateId id, std::string_view rendered);

}  // namespace eventflow
