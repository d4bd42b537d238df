#include "eventflow/popularity.hpp"

#include "eventflow/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace eventflow {

namespace {

bool observed(const Post& post, const SelectionConfig& cfg) {
    return !cfg.observation_cutoff || post.created_at < *cfg.observation_cutoff;
}

void require_sessions(const std::vector<EventSession>& sessions) {
    if (sessions.empty()) throw PreconditionError("popularity", "event has no sessions");
    for (std::size_t i = 1; i < sessions.size(); ++i) {
        if (sessions[i].start < sessions[i - 1].start) {
            throw PreconditionError("popularity", "sessions must be sorted by start");
        }
    }
}

}  // namespace

void SelectionConfig::validate() const {
    if (top_g < 1) throw ConfigError("popularity", "top_g must be >= 1");
    if (temporal_threshold_months < 0) throw ConfigError("popularity", "temporal threshold must be >= 0");
}

double engagement(const Post& post) {
    return static_cast<double>(post.likes) + static_cast<double>(post.collects);
}

std::vector<Post> select_top_posts(std::vector<Post> posts, const SelectionConfig& cfg) {
    std::sort(posts.begin(), posts.end(), [](const Post& a, const Post& b) {
        if (a.likes != b.likes) return a.likes > b.likes;
        if (a.collects != b.collects) return a.collects > b.collects;
        if (a.created_at != b.created_at) return a.created_at < b.created_at;
        return a.post_id < b.post_id;
    });
    if (posts.size() > static_cast<std::size_t>(cfg.top_g)) posts.resize(static_cast<std::size_t>(cfg.top_g));
    return posts;
}

DateTime promotional_window_start(const std::vector<EventSession>& sessions, const SelectionConfig& cfg) {
    require_sessions(sessions);
    return add_months(sessions.front().start, -cfg.temporal_threshold_months);
}

PostSplit split_pre_post(const std::vector<Post>& posts, const std::vector<EventSession>& sessions,
                         const SelectionConfig& cfg) {
    require_sessions(sessions);
    const DateTime first_start = sessions.front().start;
    const DateTime window_start = promotional_window_start(sessions, cfg);
    PostSplit split;
    for (const auto& post : posts) {
        if (!observed(post, cfg)) continue;
        const DateTime t = post.created_at;
        if (window_start <= t && t < first_start) {
            split.promotional.push_back(post);
            continue;
        }
        for (std::size_t k = 0; k + 1 < sessions.size(); ++k) {
            // overlapping sessions give an empty window
            if (sessions[k].end <= t && t < sessions[k + 1].start) {
                split.experience[static_cast<int>(k) + 1].push_back(post);
                break;
            }
        }
    }
    return split;
}

namespace {

void check_windows(std::size_t given, int session_count) {
    if (session_count < 1) throw PreconditionError("popularity", "session count must be >= 1");
    if (given != static_cast<std::size_t>(session_count - 1)) {
        throw PreconditionError("popularity", fmt::format("expected {} WOM windows, got {}", session_count - 1, given));
    }
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t out = 0;
    if (__builtin_mul_overflow(a, b, &out)) throw PreconditionError("popularity", "WOM numerator overflows int64");
    return out;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t out = 0;
    if (__builtin_add_overflow(a, b, &out)) throw PreconditionError("popularity", "WOM numerator overflows int64");
    return out;
}

constexpr double kExactLimit = 9007199254740992.0;  // 2^53

}  // namespace

WompFractions wom_popularity_exact(std::span<const std::int64_t> wom, int session_count) {
    check_windows(wom.size(), session_count);
    WompFractions out;
    for (std::int64_t k = 2; k < session_count; ++k) {
        out.denominator = checked_mul(out.denominator / std::gcd(out.denominator, k), k);
    }
    out.numerators.assign(static_cast<std::size_t>(session_count), 0);
    std::int64_t carried = 0;
    for (int n = 2; n <= session_count; ++n) {
        const int window = n - 1;
        const std::int64_t value = wom[static_cast<std::size_t>(window - 1)];
        if (value < 0) throw PreconditionError("popularity", "WOM values must be non-negative");
        carried = checked_add(carried, checked_mul(value, out.denominator / (session_count - window)));
        out.numerators[static_cast<std::size_t>(n - 1)] = carried;
    }
    return out;
}

std::vector<double> wom_popularity(std::span<const double> wom, int session_count) {
    check_windows(wom.size(), session_count);
    for (double value : wom) {
        if (!(value >= 0.0)) throw PreconditionError("popularity", "WOM values must be non-negative");
    }
    const bool integral = std::all_of(wom.begin(), wom.end(),
                                      [](double v) { return v < kExactLimit && v == std::floor(v); });
    if (integral) {
        std::vector<std::int64_t> counts(wom.size());
        std::transform(wom.begin(), wom.end(), counts.begin(), [](double v) { return static_cast<std::int64_t>(v); });
        try {
            const WompFractions exact = wom_popularity_exact(counts, session_count);
            const bool representable =
                static_cast<double>(exact.denominator) < kExactLimit &&
                std::all_of(exact.numerators.begin(), exact.numerators.end(),
                            [](std::int64_t v) { return static_cast<double>(v) < kExactLimit; });
            if (representable) {
                std::vector<double> womp(exact.numerators.size());
                const auto den = static_cast<double>(exact.denominator);
                std::transform(exact.numerators.begin(), exact.numerators.end(), womp.begin(),
                               [den](std::int64_t v) { return static_cast<double>(v) / den; });
                return womp;
            }
        } catch (const PreconditionError&) {
            // Too large for the exact path; fall through to floating point.
        }
    }
    std::vector<double> womp(static_cast<std::size_t>(session_count), 0.0);
    double carried = 0.0;
    for (int n = 2; n <= session_count; ++n) {
        const int window = n - 1;
        carried += wom[static_cast<std::size_t>(window - 1)] / static_cast<double>(session_count - window);
        womp[static_cast<std::size_t>(n - 1)] = carried;
    }
    return womp;
}

double overall_popularity(const Event& event, const std::vector<Post>& related, const SelectionConfig& cfg) {
    require_sessions(event.sessions);
    const DateTime from = promotional_window_start(event.sessions, cfg);
    const DateTime until = add_months(event.sessions.back().end, cfg.temporal_threshold_months);
    double total = 0.0;
    for (const auto& post : related) {
        if (observed(post, cfg) && from <= post.created_at && post.created_at < until) total += engagement(post);
    }
    return total;
}

double promotional_popularity(const Event& event, const std::vector<Post>& related, const SelectionConfig& cfg) {
    double total = 0.0;
    for (const auto& post : split_pre_post(related, event.sessions, cfg).promotional) total += engagement(post);
    return total;
}

PopularityMetrics compute_metrics(const Event& event, const std::vector<Post>& related, const SelectionConfig& cfg) {
    PopularityMetrics m;
    m.event_id = event.event_id;
    const auto split = split_pre_post(related, event.sessions, cfg);
    for (const auto& post : split.promotional) m.promotional += engagement(post);
    const int n_sessions = static_cast<int>(event.sessions.size());
    m.wom_raw.assign(static_cast<std::size_t>(n_sessions - 1), 0.0);
    for (const auto& [window, posts] : split.experience) {
        for (const auto& post : posts) m.wom_raw[static_cast<std::size_t>(window - 1)] += engagement(post);
    }
    m.wom_per_session = wom_popularity(m.wom_raw, n_sessions);
    m.overall = overall_popularity(event, related, cfg);
    return m;
}

double daily_type_aggregate(const std::vector<Event>& events, const std::vector<PopularityMetrics>& metrics, Date date,
                            EventType type, AggregateKind kind) {
    if (events.size() != metrics.size()) {
        throw PreconditionError("popularity", "metrics must be computed for every event");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const Event& event = events[i];
        if (event.event_type != type) continue;
        const PopularityMetrics& m = metrics[i];
        if (m.event_id != event.event_id) throw PreconditionError("popularity", "metrics not aligned with events");
        bool on_date = false;
        double wom = 0.0;
        for (std::size_t k = 0; k < event.sessions.size(); ++k) {
            if (day_of(event.sessions[k].start) != date) continue;
            on_date = true;
            if (k < m.wom_per_session.size()) wom += m.wom_per_session[k];
        }
        if (!on_date) continue;
        switch (kind) {
            case AggregateKind::count: total += 1.0; break;
            case AggregateKind::overall: total += m.overall; break;
            case AggregateKind::promotional: total += m.promotional; break;
            case AggregateKind::wom: total += wom; break;
        }
    }
    return total;
}

WomSplit exhibition_wom_split(const Event& event, std::span<const double> womp) {
    if (event.event_type != EventType::exhibition) {
        throw TypeMismatch(fmt::format("event {} is a {}, not an exhibition", event.event_id, to_string(event.event_type)));
    }
    if (womp.size() != event.sessions.size()) {
        throw PreconditionError("popularity", "one WOMP value per session expected");
    }
    WomSplit split;
    if (event.sessions.empty()) return split;
    const Date first_day = day_of(event.sessions.front().start);
    for (std::size_t k = 0; k < event.sessions.size(); ++k) {
        const auto offset = (day_of(event.sessions[k].start) - first_day).count();
        if (offset < 4) {
            split.early += womp[k];
        } else {
            split.late += womp[k];
        }
    }
    return split;
}

}  // namespace eventflow
