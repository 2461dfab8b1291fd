#include "pintrack/auxdata.hpp"
#include "pintrack/errors.hpp"
#include "pintrack/geo.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace pintrack {

namespace {

// Minimal scanner for the map subset: start tags, end tags, self-closing
// tags, attributes in double or single quotes. Comments, processing
// instructions and unknown elements pass through unharmed.
struct XmlTag {
    std::string name;
    std::map<std::string, std::string> attrs;
    bool closing = false;      // </name>
    bool self_closing = false; // <name ... />
    int line = 0;
};

class XmlScanner {
public:
    explicit XmlScanner(std::istream& in) {
        std::ostringstream ss;
        ss << in.rdbuf();
        text_ = ss.str();
    }

    std::optional<XmlTag> next() {
        while (true) {
            const auto lt = text_.find('<', pos_);
            if (lt == std::string::npos) return std::nullopt;
            bump_line(pos_, lt);
            pos_ = lt;
            if (text_.compare(pos_, 4, "<!--") == 0) {
                const auto end = text_.find("-->", pos_);
                if (end == std::string::npos)
                    raise(errc::malformed_xml, fmt::format("line {}: unterminated comment", line_));
                bump_line(pos_, end + 3);
                pos_ = end + 3;
                continue;
            }
            if (text_.compare(pos_, 2, "<?") == 0) {
                const auto end = text_.find("?>", pos_);
                if (end == std::string::npos)
                    raise(errc::malformed_xml, fmt::format("line {}: unterminated declaration", line_));
                bump_line(pos_, end + 2);
                pos_ = end + 2;
                continue;
            }
            return scan_tag();
        }
    }

private:
    void bump_line(std::size_t from, std::size_t to) {
        for (std::size_t i = from; i < to && i < text_.size(); ++i)
            if (text_[i] == '\n') ++line_;
    }

    XmlTag scan_tag() {
        XmlTag tag;
        tag.line = line_;
        std::size_t i = pos_ + 1;
        if (i < text_.size() && text_[i] == '/') {
            tag.closing = true;
            ++i;
        }
        const std::size_t name_start = i;
        while (i < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[i])) ||
                                    text_[i] == '_' || text_[i] == ':'))
            ++i;
        tag.name = text_.substr(name_start, i - name_start);
        if (tag.name.empty())
            raise(errc::malformed_xml, fmt::format("line {}: empty tag name", line_));
        while (true) {
            while (i < text_.size() && std::isspace(static_cast<unsigned char>(text_[i]))) {
                if (text_[i] == '\n') ++line_;
                ++i;
            }
            if (i >= text_.size())
                raise(errc::malformed_xml, fmt::format("line {}: unterminated tag", tag.line));
            if (text_[i] == '>') {
                ++i;
                break;
            }
            if (text_[i] == '/' && i + 1 < text_.size() && text_[i + 1] == '>') {
                tag.self_closing = true;
                i += 2;
                break;
            }
            // attribute
            const std::size_t key_start = i;
            while (i < text_.size() && text_[i] != '=' &&
                   !std::isspace(static_cast<unsigned char>(text_[i])) && text_[i] != '>')
                ++i;
            const std::string key = text_.substr(key_start, i - key_start);
            while (i < text_.size() && std::isspace(static_cast<unsigned char>(text_[i]))) ++i;
            if (i >= text_.size() || text_[i] != '=')
                raise(errc::malformed_xml,
                      fmt::format("line {}: attribute '{}' missing '='", tag.line, key));
            ++i;
            while (i < text_.size() && std::isspace(static_cast<unsigned char>(text_[i]))) ++i;
            if (i >= text_.size() || (text_[i] != '"' && text_[i] != '\''))
                raise(errc::malformed_xml,
                      fmt::format("line {}: attribute '{}' missing quote", tag.line, key));
            const char quote = text_[i];
            ++i;
            const std::size_t val_start = i;
            while (i < text_.size() && text_[i] != quote) {
                if (text_[i] == '\n') ++line_;
                ++i;
            }
            if (i >= text_.size())
                raise(errc::malformed_xml,
                      fmt::format("line {}: unterminated attribute value", tag.line));
            tag.attrs[key] = text_.substr(val_start, i - val_start);
            ++i;
        }
        pos_ = i;
        return tag;
    }

    std::string text_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

double attr_double(const XmlTag& tag, const char* key) {
    const auto it = tag.attrs.find(key);
    if (it == tag.attrs.end())
        raise(errc::malformed_xml,
              fmt::format("line {}: <{}> missing attribute '{}'", tag.line, tag.name, key));
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        raise(errc::malformed_xml,
              fmt::format("line {}: attribute '{}' not numeric: '{}'", tag.line, key,
                          it->second));
    }
}

std::int64_t attr_id(const XmlTag& tag, const char* key) {
    const auto it = tag.attrs.find(key);
    if (it == tag.attrs.end())
        raise(errc::malformed_xml,
              fmt::format("line {}: <{}> missing attribute '{}'", tag.line, tag.name, key));
    try {
        return std::stoll(it->second);
    } catch (const std::exception&) {
        raise(errc::malformed_xml,
              fmt::format("line {}: attribute '{}' not an id: '{}'", tag.line, key,
                          it->second));
    }
}

} // namespace

MapXmlData read_map_xml(std::istream& in) {
    MapXmlData data;
    XmlScanner scanner(in);
    std::optional<MapXmlNode> open_node;
    std::optional<MapXmlWay> open_way;
    while (auto tag = scanner.next()) {
        if (tag->closing) {
            if (tag->name == "node" && open_node) {
                data.nodes.push_back(*open_node);
                open_node.reset();
            } else if (tag->name == "way" && open_way) {
                data.ways.push_back(*open_way);
                open_way.reset();
            }
            continue;
        }
        if (tag->name == "node") {
            MapXmlNode n{attr_id(*tag, "id"), attr_double(*tag, "lat"),
                         attr_double(*tag, "lon"), std::nullopt};
            if (tag->self_closing)
                data.nodes.push_back(n);
            else
                open_node = n;
        } else if (tag->name == "tag" && open_node) {
            const auto k = tag->attrs.find("k");
            const auto v = tag->attrs.find("v");
            if (k != tag->attrs.end() && v != tag->attrs.end() && k->second == "ele") {
                try {
                    open_node->ele = std::stod(v->second);
                } catch (const std::exception&) {
                    raise(errc::malformed_xml,
                          fmt::format("line {}: ele tag not numeric: '{}'", tag->line,
                                      v->second));
                }
            }
        } else if (tag->name == "way") {
            if (tag->self_closing) continue; // empty way carries nothing
            open_way = MapXmlWay{attr_id(*tag, "id"), {}};
        } else if (tag->name == "nd") {
            if (!open_way)
                raise(errc::malformed_xml,
                      fmt::format("line {}: <nd> outside <way>", tag->line));
            open_way->nds.push_back(attr_id(*tag, "ref"));
        }
        // anything else (osm, bounds, relation, non-ele tags) is ignored
    }
    if (open_node || open_way) raise(errc::malformed_xml, "unclosed <node> or <way>");
    return data;
}

void write_map_xml(const MapXmlData& data, std::ostream& out) {
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<osm version=\"0.6\">\n";
    for (const auto& n : data.nodes) {
        if (n.ele)
            out << fmt::format(
                "  <node id=\"{}\" lat=\"{}\" lon=\"{}\">\n    <tag k=\"ele\" "
                "v=\"{}\"/>\n  </node>\n",
                n.id, n.lat, n.lon, *n.ele);
        else
            out << fmt::format("  <node id=\"{}\" lat=\"{}\" lon=\"{}\"/>\n", n.id, n.lat,
                               n.lon);
    }
    for (const auto& w : data.ways) {
        out << fmt::format("  <way id=\"{}\">\n", w.id);
        for (auto ref : w.nds) out << fmt::format("    <nd ref=\"{}\"/>\n", ref);
        out << "  </way>\n";
    }
    out << "</osm>\n";
}

RoadGraph build_road_graph(const MapXmlData& data) {
    std::map<std::int64_t, const MapXmlNode*> nodes_by_id;
    for (const auto& n : data.nodes) {
        if (!nodes_by_id.emplace(n.id, &n).second)
            raise(errc::malformed_xml, fmt::format("duplicate node id {}", n.id));
    }

    // count way references per node; way endpoints always become vertices
    std::map<std::int64_t, int> ref_ways;
    std::set<std::int64_t> endpoints;
    std::vector<const MapXmlWay*> ways;
    ways.reserve(data.ways.size());
    for (const auto& w : data.ways) ways.push_back(&w);
    std::sort(ways.begin(), ways.end(),
              [](const MapXmlWay* a, const MapXmlWay* b) { return a->id < b->id; });

    for (const auto* w : ways) {
        if (w->nds.size() < 2)
            raise(errc::malformed_xml,
                  fmt::format("way {} has fewer than 2 node refs", w->id));
        std::set<std::int64_t> seen_in_way;
        for (auto ref : w->nds) {
            if (nodes_by_id.find(ref) == nodes_by_id.end())
                raise(errc::dangling_node_ref,
                      fmt::format("way {} references missing node {}", w->id, ref));
            if (seen_in_way.insert(ref).second) ++ref_ways[ref];
        }
        endpoints.insert(w->nds.front());
        endpoints.insert(w->nds.back());
    }

    auto is_vertex = [&](std::int64_t id) {
        const auto it = ref_ways.find(id);
        return (it != ref_ways.end() && it->second >= 2) || endpoints.count(id) > 0;
    };

    RoadGraph g;
    std::map<std::int64_t, std::uint32_t> vid; // node id -> vertex index
    for (const auto& [id, n] : nodes_by_id) {
        if (!is_vertex(id)) continue;
        Vertex v;
        v.node_id = id;
        v.lat = n->lat;
        v.lon = n->lon;
        v.elevation_m = n->ele ? *n->ele : std::numeric_limits<double>::quiet_NaN();
        vid[id] = static_cast<std::uint32_t>(g.vertices.size());
        g.vertices.push_back(std::move(v));
    }

    auto add_edge_pair = [&](std::uint32_t a, std::uint32_t b, double length) {
        const auto& va = g.vertices[a];
        const auto& vb = g.vertices[b];
        const double bearing = geo::chord_bearing_deg(va.lat, va.lon, vb.lat, vb.lon);
        const auto fwd = static_cast<std::uint32_t>(g.edges.size());
        const auto rev = fwd + 1;
        g.edges.push_back(Edge{a, b, length, bearing, rev});
        g.edges.push_back(Edge{b, a, length, geo::norm360(bearing + 180.0), fwd});
        g.vertices[a].out_edges.push_back(fwd);
        g.vertices[b].out_edges.push_back(rev);
    };

    // walk each way, splitting at vertex nodes; the segment lengths of the
    // original chain accumulate into the collapsed edge
    for (const auto* w : ways) {
        std::vector<std::int64_t> chain;
        double chain_len = 0.0;
        auto flush = [&]() {
            if (chain.size() < 2) return;
            const std::int64_t a = chain.front(), b = chain.back();
            if (a == b) {
                // loop chain: split at a middle interior node so both halves
                // are representable as single edges
                const std::size_t mid = chain.size() / 2;
                double left = 0.0;
                for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
                    const auto* p = nodes_by_id[chain[i]];
                    const auto* q = nodes_by_id[chain[i + 1]];
                    const double seg = geo::haversine_m(p->lat, p->lon, q->lat, q->lon);
                    if (i + 1 <= mid) left += seg;
                }
                const std::int64_t mid_id = chain[mid];
                if (!vid.count(mid_id)) {
                    const auto* n = nodes_by_id[mid_id];
                    Vertex v;
                    v.node_id = mid_id;
                    v.lat = n->lat;
                    v.lon = n->lon;
                    v.elevation_m =
                        n->ele ? *n->ele : std::numeric_limits<double>::quiet_NaN();
                    vid[mid_id] = static_cast<std::uint32_t>(g.vertices.size());
                    g.vertices.push_back(std::move(v));
                }
                add_edge_pair(vid[a], vid[mid_id], left);
                add_edge_pair(vid[mid_id], vid[b], chain_len - left);
            } else {
                add_edge_pair(vid[a], vid[b], chain_len);
            }
        };
        for (std::size_t i = 0; i < w->nds.size(); ++i) {
            const std::int64_t id = w->nds[i];
            if (!chain.empty()) {
                const auto* p = nodes_by_id[chain.back()];
                const auto* q = nodes_by_id[id];
                chain_len += geo::haversine_m(p->lat, p->lon, q->lat, q->lon);
            }
            chain.push_back(id);
            if (is_vertex(id) && chain.size() >= 2) {
                flush();
                chain.clear();
                chain_len = 0.0;
                chain.push_back(id);
            }
        }
        if (chain.size() >= 2)
            raise(errc::malformed_xml,
                  fmt::format("way {} does not end at an intersection or endpoint", w->id));
    }

    return g;
}

RoadGraph parse_map_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(errc::malformed_xml, "cannot open map file: " + path);
    return build_road_graph(read_map_xml(in));
}

std::optional<std::uint32_t> RoadGraph::vertex_by_node_id(std::int64_t node_id) const {
    for (std::uint32_t i = 0; i < vertices.size(); ++i)
        if (vertices[i].node_id == node_id) return i;
    return std::nullopt;
}

double RoadGraph::turn_through(std::uint32_t in_edge, std::uint32_t out_edge) const {
    const Edge& in = edges[in_edge];
    const Edge& out = edges[out_edge];
    if (in.to != out.from)
        raise(errc::invariant_violation, "turn_through edges do not share a vertex");
    const double d = geo::wrap180(out.bearing_deg - in.bearing_deg);
    return d == -180.0 ? 180.0 : d;
}

double RoadGraph::turn_table_angle(std::uint32_t a, std::uint32_t b) const {
    if (edges[a].from != edges[b].from)
        raise(errc::invariant_violation, "turn table pair must leave the same vertex");
    if (a == b) raise(errc::invariant_violation, "turn table excludes self pairs");
    return turn_through(edges[a].reverse, b);
}

bool RoadGraph::has_all_elevations() const {
    for (const auto& v : vertices)
        if (std::isnan(v.elevation_m)) return false;
    return true;
}

void RoadGraph::require_elevations() const {
    for (const auto& v : vertices)
        if (std::isnan(v.elevation_m))
            raise(errc::missing_vertex_elevation,
                  fmt::format("vertex (node {}) has no elevation", v.node_id));
}

std::vector<std::uint32_t> RoadGraph::vertices_in_box(double lat_lo, double lon_lo,
                                                      double lat_hi, double lon_hi) const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < vertices.size(); ++i) {
        const auto& v = vertices[i];
        if (v.lat >= lat_lo && v.lat <= lat_hi && v.lon >= lon_lo && v.lon <= lon_hi)
            out.push_back(i);
    }
    return out;
}

void RoadGraph::bbox(double& lat_lo, double& lon_lo, double& lat_hi, double& lon_hi) const {
    lat_lo = lon_lo = std::numeric_limits<double>::infinity();
    lat_hi = lon_hi = -std::numeric_limits<double>::infinity();
    for (const auto& v : vertices) {
        lat_lo = std::min(lat_lo, v.lat);
        lat_hi = std::max(lat_hi, v.lat);
        lon_lo = std::min(lon_lo, v.lon);
        lon_hi = std::max(lon_hi, v.lon);
    }
}

bool RoadGraph::contains(double lat, double lon) const {
    double a, b, c, d;
    bbox(a, b, c, d);
    return lat >= a && lat <= c && lon >= b && lon <= d;
}

void attach_elevations(RoadGraph& g, const ElevationSource& source) {
    for (auto& v : g.vertices) {
        const double e = source(v.lat, v.lon);
        if (std::isnan(e))
            raise(errc::missing_vertex_elevation,
                  fmt::format("elevation source has no value at ({}, {})", v.lat, v.lon));
        v.elevation_m = e;
    }
}

} // namespace pintrack
