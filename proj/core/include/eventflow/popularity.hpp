#pragma once

#include "eventflow/domain.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace eventflow {

struct SelectionConfig {
    int top_g = 100;
    /// Posts older than this many calendar months before the first session
    /// are discarded.
    int temporal_threshold_months = 2;
    /// When set, posts created at or after this instant are ignored.
    std::optional<DateTime> observation_cutoff;

    void validate() const;
};

struct PopularityMetrics {
    std::string event_id;
    double overall = 0.0;
    double promotional = 0.0;
    /// WOMP_n for n = 1..N (index 0 is session 1 and is always 0).
    std::vector<double> wom_per_session;
    /// WOM_{n'} for n' = 1..N-1.
    std::vector<double> wom_raw;
};

/// Posts bucketed by timing relative to an event's sessions.
struct PostSplit {
    std::vector<Post> promotional;
    /// Key n' (1-based): posts created in [end(n'), start(n'+1)).
    std::map<int, std::vector<Post>> experience;
};

double engagement(const Post& post);

/// Up to top_g posts ordered by likes desc, then collects desc, created_at
/// asc, post_id asc.
std::vector<Post> select_top_posts(std::vector<Post> posts, const SelectionConfig& cfg);

/// Start of the promotional window: first session start minus the threshold.
DateTime promotional_window_start(const std::vector<EventSession>& sessions, const SelectionConfig& cfg);

PostSplit split_pre_post(const std::vector<Post>& posts, const std::vector<EventSession>& sessions,
                         const SelectionConfig& cfg);

/// Even redistribution of each window's WOM over the remaining sessions:
/// WOMP_1 = 0, WOMP_n = sum_{n'=1}^{n-1} WOM_{n'} / (N - n'). Integral
/// inputs go through wom_popularity_exact and one final division, so each
/// value is the correctly rounded exact quotient.
std::vector<double> wom_popularity(std::span<const double> wom, int session_count);
/// Integer engagement keeps the redistribution exact: WOMP_n equals
/// numerators[n-1] / denominator with denominator = lcm(1..N-1), and the
/// numerators sum to denominator * sum(WOM). Throws PreconditionError on
/// int64 overflow.
struct WompFractions {
    std::vector<std::int64_t> numerators;
    std::int64_t denominator = 1;
};
WompFractions wom_popularity_exact(std::span<const std::int64_t> wom, int session_count);


/// Engagement of related posts created in
/// [first start - threshold, last end + threshold).
double overall_popularity(const Event& event, const std::vector<Post>& related, const SelectionConfig& cfg);
double promotional_popularity(const Event& event, const std::vector<Post>& related, const SelectionConfig& cfg);

/// All metrics for one event from its relevance-filtered posts.
PopularityMetrics compute_metrics(const Event& event, const std::vector<Post>& related, const SelectionConfig& cfg);

enum class AggregateKind { count, overall, promotional, wom };

/// Per-day sum over events of `type` holding a session on `date`. For wom
/// only the WOMP of the sessions on that date is summed.
double daily_type_aggregate(const std::vector<Event>& events, const std::vector<PopularityMetrics>& metrics, Date date,
                            EventType type, AggregateKind kind);

struct WomSplit {
    double early = 0.0;
    double late = 0.0;
};

/// Splits an exhibition's WOMP between sessions starting within the first
/// four calendar days (counting the first session's date) and the rest.
WomSplit exhibition_wom_split(const Event& event, std::span<const double> womp);

}  // namespace eventflow
