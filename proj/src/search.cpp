#include "pintrack/estimators/routes.hpp"

#include "pintrack/errors.hpp"
#include "pintrack/geo.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <unordered_map>

namespace pintrack {

using namespace geo;

namespace {

struct PathNode {
    std::uint32_t vertex;
    std::int32_t parent; // -1 at the start of a path
};

struct Leaf {
    std::int32_t node;        // arena index of the current vertex
    std::uint32_t root;       // vertex where the path started (turn 1)
    std::uint32_t first_out;  // edge chosen at turn 1
    std::uint32_t out_edge;   // edge chosen at the latest turn
    double elev_err = 0.0;
    double turn_err = 0.0;
    double v_lo = 0.0;        // feasible travel speeds given legs so far
    double v_hi = 1e18;
};

// Depth-first enumeration of straight runs: starting along first_edge, keep
// following exits that deviate by at most straight_tol, up to max_edges
// hops. Every prefix is reported (via vertices, terminal edge, length).
class ChainWalker {
public:
    ChainWalker(const RoadGraph& g, double straight_tol_deg, int max_edges)
        : g_(g), tol_(straight_tol_deg), max_(max_edges) {}

    template <typename Fn>
    void walk(std::uint32_t first_edge, Fn&& fn) {
        via_.clear();
        step(first_edge, g_.edges[first_edge].length_m, fn);
    }

private:
    template <typename Fn>
    void step(std::uint32_t edge, double length_m, Fn& fn) {
        via_.push_back(g_.edges[edge].to);
        fn(static_cast<const std::vector<std::uint32_t>&>(via_), edge, length_m);
        if (static_cast<int>(via_.size()) < max_) {
            for (std::uint32_t g2 : g_.vertices[g_.edges[edge].to].out_edges)
                if (std::abs(g_.turn_through(edge, g2)) <= tol_)
                    step(g2, length_m + g_.edges[g2].length_m, fn);
        }
        via_.pop_back();
    }

    const RoadGraph& g_;
    double tol_;
    int max_;
    std::vector<std::uint32_t> via_;
};

bool step_gate(const SearchConfig& cfg, double steps, double length_m) {
    if (!cfg.use_step_gate) return true;
    return length_m >= cfg.step_min_m * steps && length_m <= cfg.step_max_m * steps;
}

// Hypotheses that share a start (root and first exit), now stand on the
// same vertex about to leave along the same edge, and constrain speed to
// the same interval face identical gates and identical completions from
// here on, so only the cheapest of them can ever finish best. Strictly
// worse twins are dropped; exact ties all stay, which keeps
// indistinguishable routes visible on degenerate maps.
struct LeafState {
    std::uint64_t start_edge;
    std::uint64_t v_lo_bits, v_hi_bits;
    bool operator==(const LeafState&) const = default;
};

struct LeafStateHash {
    std::size_t operator()(const LeafState& s) const {
        std::uint64_t h = s.start_edge * 0x9e3779b97f4a7c15ULL;
        h ^= s.v_lo_bits + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        h ^= s.v_hi_bits + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return static_cast<std::size_t>(h);
    }
};

void prune_dominated(std::vector<Leaf>& leaves, std::size_t n_edges, double w_e,
                     double w_t) {
    std::unordered_map<LeafState, double, LeafStateHash> best;
    best.reserve(leaves.size());
    auto key = [n_edges](const Leaf& l) {
        return LeafState{(static_cast<std::uint64_t>(l.root) * n_edges + l.first_out) *
                                 n_edges +
                             l.out_edge,
                         std::bit_cast<std::uint64_t>(l.v_lo),
                         std::bit_cast<std::uint64_t>(l.v_hi)};
    };
    auto cost = [&](const Leaf& l) { return w_e * l.elev_err + w_t * l.turn_err; };
    for (const Leaf& l : leaves) {
        auto [it, fresh] = best.try_emplace(key(l), cost(l));
        if (!fresh) it->second = std::min(it->second, cost(l));
    }
    std::erase_if(leaves, [&](const Leaf& l) {
        return cost(l) > best[key(l)] + 1e-12;
    });
}

} // namespace

RankedRoutes match_route(const RoadGraph& graph, const std::vector<LegObservation>& legs,
                         const EndObservation& entry, const EndObservation& exit,
                         const std::optional<SeedArea>& seed, const SearchConfig& cfg) {
    graph.require_elevations();
    if (legs.empty())
        raise(errc::no_candidates, "no turn events to match against the map");

    const double w_e = cfg.w_elev > 0.0 ? cfg.w_elev : 1.0 / cfg.tol_elev_m;
    const double w_t = cfg.w_turn > 0.0 ? cfg.w_turn : 1.0 / cfg.tol_turn_deg;

    // The seed box constrains where the stream began, i.e. the start of the
    // run leading into the first turn, not the first turn vertex itself.
    double seed_lat_lo = 0, seed_lat_hi = 0, seed_lon_lo = 0, seed_lon_hi = 0;
    if (seed) {
        const double dlat = rad2deg(seed->half_side_m / kEarthRadiusM);
        const double dlon = dlat / std::cos(deg2rad(seed->lat));
        seed_lat_lo = seed->lat - dlat;
        seed_lat_hi = seed->lat + dlat;
        seed_lon_lo = seed->lon - dlon;
        seed_lon_hi = seed->lon + dlon;
    }
    auto in_seed = [&](std::uint32_t u) {
        if (!seed) return true;
        const auto& vx = graph.vertices[u];
        return vx.lat >= seed_lat_lo && vx.lat <= seed_lat_hi &&
               vx.lon >= seed_lon_lo && vx.lon <= seed_lon_hi;
    };

    std::vector<PathNode> arena;
    std::vector<Leaf> leaves;
    RankedRoutes out;

    auto record_series = [&] {
        std::set<std::uint32_t> roots;
        for (const Leaf& l : leaves) roots.insert(l.root);
        out.roots_per_turn.push_back(roots.size());
        out.paths_per_turn.push_back(leaves.size());
    };

    ChainWalker walker(graph, cfg.straight_tol_deg, cfg.max_chain_edges);

    // Timing uncertainty widens every leg duration by one sample spacing at
    // each boundary.
    const double tq = 2.0 * cfg.time_quantum_s;

    // A run bounded by the stream start or end must be coverable within its
    // wall-clock window at a speed the interior legs allow. Idle time near
    // the boundary only lowers the apparent speed, so the lower side gets
    // extra slack.
    auto end_run_ok = [&](double length_m, double window_s, double v_lo, double v_hi) {
        if (!cfg.use_speed_gate || window_s <= 0.0) return true;
        const double s_lo = length_m / (window_s + tq);
        const double s_hi = length_m / std::max(window_s - tq, 1e-6);
        return s_lo <= v_hi && s_hi >= v_lo * cfg.end_speed_lo;
    };

    struct Ending {
        std::vector<std::uint32_t> via;
        double elev_err, turn_err;
    };

    // Runs the device could have traveled before the first turn: backward
    // chains from the root whose far end sits at the stream-start elevation
    // (and inside the seed box, when one is given), approached along the
    // settled pre-turn heading, swinging into first_out by the observed
    // first delta. Depends only on (root, first_out), so it doubles as a
    // seeding filter; the speed window is only known once the interior legs
    // are settled, so it gates completions, not seeds.
    auto collect_entries = [&](std::uint32_t root, std::uint32_t first_out,
                               double v_lo, double v_hi) {
        std::vector<Ending> entries;
        for (std::uint32_t g1 : graph.vertices[root].out_edges) {
            if (g1 == first_out) continue; // arriving backward along the exit
            const std::uint32_t e_in = graph.edges[g1].reverse;
            const double r_turn =
                std::abs(graph.turn_through(e_in, first_out) - legs[0].delta_deg);
            if (r_turn > cfg.tol_turn_deg) continue;
            walker.walk(g1, [&](const std::vector<std::uint32_t>& via,
                                std::uint32_t terminal_edge, double length_m) {
                if (!step_gate(cfg, entry.steps, length_m)) return;
                if (!end_run_ok(length_m, entry.window_s, v_lo, v_hi)) return;
                const std::uint32_t u = via.back();
                if (!in_seed(u)) return;
                const double e_elev =
                    std::abs(graph.vertices[u].elevation_m - entry.elevation_m);
                if (e_elev > cfg.tol_elev_m) return;
                const double travel_bearing =
                    graph.edges[graph.edges[terminal_edge].reverse].bearing_deg;
                const double r_h = std::abs(wrap180(travel_bearing - entry.heading_deg));
                if (r_h > cfg.bearing_tol_deg) return;
                entries.push_back({via, e_elev, r_turn + r_h});
            });
        }
        return entries;
    };

    // Turn 1: any vertex at the right elevation with at least one entry run
    // behind it. The entry residual is added at completion time.
    for (std::uint32_t v = 0; v < graph.vertex_count(); ++v) {
        const double e_elev = std::abs(graph.vertices[v].elevation_m - legs[0].elevation_m);
        if (e_elev > cfg.tol_elev_m) continue;
        for (std::uint32_t f : graph.vertices[v].out_edges) {
            if (collect_entries(v, f, 0.0, 1e18).empty()) continue;
            arena.push_back({v, -1});
            leaves.push_back({static_cast<std::int32_t>(arena.size()) - 1, v, f, f,
                              e_elev, 0.0});
        }
    }
    record_series();
    if (leaves.empty())
        raise(errc::no_candidates, "no vertex matches the first turn");

    for (std::size_t k = 1; k < legs.size(); ++k) {
        std::vector<Leaf> next;
        for (const Leaf& leaf : leaves) {
            walker.walk(leaf.out_edge, [&](const std::vector<std::uint32_t>& via,
                                           std::uint32_t terminal_edge, double length_m) {
                if (!step_gate(cfg, legs[k].steps, length_m)) return;
                double v_lo = leaf.v_lo, v_hi = leaf.v_hi;
                if (cfg.use_speed_gate && legs[k].duration_s > 0.0) {
                    const double dt = legs[k].duration_s;
                    v_lo = std::max(v_lo, length_m / (dt + tq) / cfg.speed_var);
                    v_hi = std::min(v_hi, length_m / std::max(dt - tq, 1e-6) *
                                              cfg.speed_var);
                    if (v_lo > v_hi) return;
                }
                const std::uint32_t w = via.back();
                const double e_elev =
                    std::abs(graph.vertices[w].elevation_m - legs[k].elevation_m);
                if (e_elev > cfg.tol_elev_m) return;
                for (std::uint32_t f2 : graph.vertices[w].out_edges) {
                    const double r =
                        std::abs(graph.turn_through(terminal_edge, f2) - legs[k].delta_deg);
                    if (r > cfg.tol_turn_deg) continue;
                    std::int32_t node = leaf.node;
                    for (std::uint32_t mid : via) {
                        arena.push_back({mid, node});
                        node = static_cast<std::int32_t>(arena.size()) - 1;
                    }
                    next.push_back({node, leaf.root, leaf.first_out, f2,
                                    leaf.elev_err + e_elev, leaf.turn_err + r, v_lo,
                                    v_hi});
                }
            });
        }
        prune_dominated(next, graph.edges.size(), w_e, w_t);
        leaves = std::move(next);
        record_series();
        if (leaves.empty())
            raise(errc::no_candidates,
                          "every candidate died at turn " + std::to_string(k + 1));
    }

    // Completions: extend each survivor backward to where the stream began
    // and forward to where it ended, gating on the settled entry/exit
    // headings and boundary elevations.
    std::set<std::uint32_t> final_roots;
    std::size_t final_leaves = 0;

    for (const Leaf& leaf : leaves) {
        const std::uint32_t root = leaf.root;

        std::vector<Ending> entries =
            collect_entries(root, leaf.first_out, leaf.v_lo, leaf.v_hi);
        if (entries.empty()) continue;

        std::vector<Ending> exits;
        walker.walk(leaf.out_edge, [&](const std::vector<std::uint32_t>& via,
                                       std::uint32_t terminal_edge, double length_m) {
            if (!step_gate(cfg, exit.steps, length_m)) return;
            if (!end_run_ok(length_m, exit.window_s, leaf.v_lo, leaf.v_hi)) return;
            const std::uint32_t x = via.back();
            const double e_elev = std::abs(graph.vertices[x].elevation_m - exit.elevation_m);
            if (e_elev > cfg.tol_elev_m) return;
            const double r_h =
                std::abs(wrap180(graph.edges[terminal_edge].bearing_deg - exit.heading_deg));
            if (r_h > cfg.bearing_tol_deg) return;
            exits.push_back({via, e_elev, r_h});
        });
        if (exits.empty()) continue;
        ++final_leaves;
        final_roots.insert(root);

        std::vector<std::uint32_t> spine;
        for (std::int32_t n = leaf.node; n >= 0; n = arena[static_cast<std::size_t>(n)].parent)
            spine.push_back(arena[static_cast<std::size_t>(n)].vertex);
        std::reverse(spine.begin(), spine.end());

        for (const Ending& en : entries) {
            for (const Ending& ex : exits) {
                CandidatePath p;
                p.vertices.assign(en.via.rbegin(), en.via.rend());
                p.vertices.insert(p.vertices.end(), spine.begin(), spine.end());
                p.vertices.insert(p.vertices.end(), ex.via.begin(), ex.via.end());
                p.elev_residual_m = leaf.elev_err + en.elev_err + ex.elev_err;
                p.turn_residual_deg = leaf.turn_err + en.turn_err + ex.turn_err;
                p.error = w_e * p.elev_residual_m + w_t * p.turn_residual_deg;
                out.paths.push_back(std::move(p));
            }
        }
    }

    if (out.paths.empty())
        raise(errc::no_candidates, "no candidate matches the stream endpoints");

    // The exit run is the last evidence applied, so the series entry for the
    // final turn reports what survived it.
    out.roots_per_turn.back() = final_roots.size();
    out.paths_per_turn.back() = final_leaves;

    std::sort(out.paths.begin(), out.paths.end(),
              [](const CandidatePath& a, const CandidatePath& b) {
                  if (a.error != b.error) return a.error < b.error;
                  return a.vertices < b.vertices;
              });
    out.paths.erase(std::unique(out.paths.begin(), out.paths.end(),
                                [](const CandidatePath& a, const CandidatePath& b) {
                                    return a.vertices == b.vertices;
                                }),
                    out.paths.end());
    return out;
}

} // namespace pintrack
