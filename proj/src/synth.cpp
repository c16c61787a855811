#include "polarnet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "polarnet/errors.hpp"
#include "polarnet/parallel.hpp"
#include "polarnet/rng.hpp"

namespace polarnet {

namespace {

constexpr const char* kOfficialClientPool[] = {"Twitter Web Client", "Twitter for iPhone",
                                               "Twitter for Android"};
constexpr const char* kUnofficialClient = "AutoPoster Pro";

std::string category_host(MediaCategory c, int variant) {
    std::string token(category_name(c));
    std::transform(token.begin(), token.end(), token.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    return token + "-news-" + std::to_string(variant + 1) + ".example";
}

// Index draw from a cumulative weight table.
std::size_t draw_weighted(Rng& rng, const std::vector<double>& cumulative) {
    const double u = draw_unit(rng) * cumulative.back();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                                 cumulative.size() - 1);
}

std::vector<double> cumulative_weights(const std::array<double, kMediaCategoryCount>& mix) {
    std::vector<double> cum(kMediaCategoryCount);
    double acc = 0;
    for (std::size_t i = 0; i < kMediaCategoryCount; ++i) {
        acc += mix[i];
        cum[i] = acc;
    }
    return cum;
}

void validate(const SynthConfig& cfg) {
    if (cfg.n_users < 1) throw InputError("synth: n_users must be >= 1");
    if (cfg.n_influencers < 4) throw InputError("synth: n_influencers must be >= 4");
    if (cfg.epsilon < 0.0 || cfg.epsilon > 0.5) throw InputError("synth: epsilon must lie in [0, 0.5]");
    if (cfg.side_split <= 0.0 || cfg.side_split >= 1.0)
        throw InputError("synth: side_split must lie in (0, 1)");
    if (cfg.unofficial_fraction < 0.0 || cfg.unofficial_fraction > 1.0)
        throw InputError("synth: unofficial_fraction must lie in [0, 1]");
    if (cfg.quote_fraction < 0.0 || cfg.quote_fraction > 1.0)
        throw InputError("synth: quote_fraction must lie in [0, 1]");
    if (cfg.activity_exponent <= 1.0) throw InputError("synth: activity_exponent must exceed 1");
    if (cfg.activity_floor < 1) throw InputError("synth: activity_floor must be >= 1");
    auto mix_sum = [](const std::array<double, kMediaCategoryCount>& mix) {
        double s = 0;
        for (const auto m : mix) {
            if (m < 0) return -1.0;
            s += m;
        }
        return s;
    };
    if (mix_sum(cfg.right_mix) <= 0 || mix_sum(cfg.left_mix) <= 0) {
        throw InputError("synth: category mixes must be non-negative and non-empty");
    }
    const auto n_right = static_cast<std::size_t>(
        std::llround(cfg.side_split * static_cast<double>(cfg.n_influencers)));
    if (n_right < 2 || cfg.n_influencers - n_right < 2) {
        throw InputError("synth: need at least 2 influencers per side");
    }
}

} // namespace

SynthCorpus generate_corpus(const SynthConfig& cfg) {
    validate(cfg);

    SynthCorpus result;

    // Influencers occupy ids 1..n_influencers, right side first.
    const auto n_right_inf = static_cast<std::size_t>(
        std::llround(cfg.side_split * static_cast<double>(cfg.n_influencers)));
    std::vector<UserId> right_influencers, left_influencers;
    for (std::size_t i = 0; i < cfg.n_influencers; ++i) {
        const UserId id = i + 1;
        result.influencer_ids.push_back(id);
        const int side = i < n_right_inf ? +1 : -1;
        result.influencer_sides.emplace_back(id, side);
        (side > 0 ? right_influencers : left_influencers).push_back(id);
    }

    // Zipf attractiveness by rank within each side.
    auto popularity_cumulative = [&](std::size_t count) {
        std::vector<double> cum(count);
        double acc = 0;
        for (std::size_t k = 0; k < count; ++k) {
            acc += std::pow(static_cast<double>(k + 1), -cfg.popularity_exponent);
            cum[k] = acc;
        }
        return cum;
    };
    const auto right_pop = popularity_cumulative(right_influencers.size());
    const auto left_pop = popularity_cumulative(left_influencers.size());
    const auto right_mix_cum = cumulative_weights(cfg.right_mix);
    const auto left_mix_cum = cumulative_weights(cfg.left_mix);

    struct Event {
        UserId source;
        InteractionKind kind;
        MediaCategory category;
        int host_variant;
        std::string client;
    };
    std::vector<std::vector<Event>> per_user(cfg.n_users);
    std::vector<int> user_side(cfg.n_users);

    parallel_for(cfg.n_users, cfg.threads, [&](std::size_t u) {
        auto rng = make_rng(mix_seed(cfg.seed, u));
        const int side = draw_unit(rng) < cfg.side_split ? +1 : -1;
        user_side[u] = side;
        const std::uint32_t activity =
            std::min<std::uint32_t>(draw_power_law(rng, cfg.activity_exponent, cfg.activity_floor),
                                    100000);
        auto& events = per_user[u];
        events.reserve(activity);
        for (std::uint32_t e = 0; e < activity; ++e) {
            const bool cross = draw_unit(rng) < cfg.epsilon;
            const int target_side = cross ? -side : side;
            const auto& pool = target_side > 0 ? right_influencers : left_influencers;
            const auto& pop = target_side > 0 ? right_pop : left_pop;
            const UserId influencer = pool[draw_weighted(rng, pop)];

            Event ev;
            ev.source = influencer;
            ev.kind = draw_unit(rng) < cfg.quote_fraction ? InteractionKind::quote
                                                          : InteractionKind::retweet;
            const auto& mix_cum = target_side > 0 ? right_mix_cum : left_mix_cum;
            ev.category = static_cast<MediaCategory>(draw_weighted(rng, mix_cum));
            ev.host_variant = static_cast<int>(draw_below(rng, 2));
            if (draw_unit(rng) < cfg.unofficial_fraction) {
                ev.client = kUnofficialClient;
            } else {
                ev.client = kOfficialClientPool[draw_below(rng, 3)];
            }
            events.push_back(std::move(ev));
        }
    });

    // Canonical assembly: users ascending, events in generation order, then
    // influencer originals. Timestamps and tweet ids are sequential.
    Timestamp now = SynthConfig::kBaseTimestamp;
    TweetId next_tweet_id = 1000000;
    std::array<std::array<std::uint64_t, 2>, kMediaCategoryCount> host_counts{};

    auto push_record = [&](UserId user, const Event& ev, bool original) {
        TweetRecord rec;
        rec.tweet_id = next_tweet_id++;
        rec.user_id = user;
        rec.timestamp = now++;
        rec.kind = original ? InteractionKind::original : ev.kind;
        if (!original) rec.source_user_id = ev.source;
        const auto host = category_host(ev.category, ev.host_variant);
        rec.urls.push_back("https://" + host + "/p/" + std::to_string(rec.tweet_id));
        rec.client = ev.client;
        host_counts[static_cast<std::size_t>(ev.category)][static_cast<std::size_t>(ev.host_variant)] += 1;
        result.corpus.records.push_back(std::move(rec));
    };

    for (std::size_t u = 0; u < cfg.n_users; ++u) {
        const UserId id = cfg.n_influencers + 1 + u;
        result.user_sides.emplace_back(id, user_side[u]);
        for (const auto& ev : per_user[u]) push_record(id, ev, false);
    }

    // A few original posts per influencer so classification stages see the
    // sources themselves, not only their retweeters.
    for (std::size_t i = 0; i < cfg.n_influencers; ++i) {
        const UserId id = i + 1;
        const int side = result.influencer_sides[i].second;
        auto rng = make_rng(mix_seed(cfg.seed, 0x0F1A000000ULL + i));
        for (int k = 0; k < 3; ++k) {
            Event ev;
            ev.source = 0;
            ev.kind = InteractionKind::original;
            const auto& mix_cum = side > 0 ? right_mix_cum : left_mix_cum;
            ev.category = static_cast<MediaCategory>(draw_weighted(rng, mix_cum));
            ev.host_variant = static_cast<int>(draw_below(rng, 2));
            ev.client = kOfficialClientPool[draw_below(rng, 3)];
            push_record(id, ev, true);
        }
    }

    result.catalog.label = "synth";
    for (std::size_t c = 0; c < kMediaCategoryCount; ++c) {
        for (int variant = 0; variant < 2; ++variant) {
            const auto count = host_counts[c][static_cast<std::size_t>(variant)];
            if (count > 0) {
                result.catalog.entries.emplace(
                    category_host(static_cast<MediaCategory>(c), variant),
                    OutletCatalog::Entry{static_cast<MediaCategory>(c), count});
            }
        }
    }
    return result;
}

} // namespace polarnet
