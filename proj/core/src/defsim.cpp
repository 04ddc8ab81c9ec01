#include "spikit/defsim.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <future>
#include <map>
#include <set>
#include <sstream>

#include "spikit/text.hpp"

namespace spikit {

namespace {

std::vector<Sym> union_relations(const std::vector<Frame>& sources, const Frame& target) {
    std::vector<Sym> out = target.relations();
    for (auto& f : sources)
        for (Sym r : f.relations())
            if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(r);
    return out;
}

void check_shape(const SimulationWitness& sw) {
    const std::size_t k = sw.sources.size();
    if (sw.g.size() != k) throw PreconditionError("need one map per source frame");
    for (std::size_t i = 0; i < k; ++i)
        if (!is_frame_homomorphism(sw.tree, sw.sources[i], sw.g[i]))
            throw PreconditionError("g" + std::to_string(i + 1) + " is not a homomorphism");
    if (!is_frame_homomorphism(sw.tree, sw.target, sw.h)) throw PreconditionError("h is not a homomorphism");
    if (sw.anchor < 0 || sw.anchor >= sw.tree.size()) throw PreconditionError("anchor is not a tree point");
    for (auto& t : sw.z) {
        if (t.xs.size() != k) throw PreconditionError("Z tuple of the wrong arity");
        for (std::size_t i = 0; i < k; ++i)
            if (t.xs[i] < 0 || t.xs[i] >= sw.sources[i].size()) throw PreconditionError("Z tuple point out of range");
        if (t.y < 0 || t.y >= sw.target.size()) throw PreconditionError("Z tuple point out of range");
    }
}

PSet image(const HomMap& m, PSet a) {
    PSet out = 0;
    for_each_bit(a, [&](int p) { out |= bit(m[p]); });
    return out;
}

PSet preimage(const HomMap& m, int y) {
    PSet out = 0;
    for (std::size_t p = 0; p < m.size(); ++p)
        if (m[p] == y) out |= bit(static_cast<int>(p));
    return out;
}

// With A the tree points outside h^-1(y), y is not in h[A], and every smaller
// A makes the premise harder, so this one set decides (s3) for the tuple.
bool s3_tuple(const std::vector<HomMap>& g, const HomMap& h, PSet tree_all, const ZTuple& t) {
    PSet a = tree_all & ~preimage(h, t.y);
    for (std::size_t i = 0; i < g.size(); ++i)
        if (!has(image(g[i], a), t.xs[i])) return true;
    return false;
}

// Calls fn on every successor tuple of xs along rel; fn returning false stops.
bool for_each_successor_tuple(const std::vector<Frame>& sources, Sym rel, const std::vector<int>& xs,
                              const std::function<bool(const std::vector<int>&)>& fn) {
    std::vector<int> cur(xs.size());
    std::function<bool(std::size_t)> go = [&](std::size_t i) -> bool {
        if (i == xs.size()) return fn(cur);
        bool more = true;
        for_each_bit(sources[i].succ(rel, xs[i]), [&](int x) {
            if (!more) return;
            cur[i] = x;
            more = go(i + 1);
        });
        return more;
    };
    return go(0);
}

bool s2_tuple(const std::vector<Frame>& sources, const Frame& target, const std::vector<Sym>& rels,
              const ZTuple& t, const std::function<bool(const ZTuple&)>& in_z) {
    for (Sym r : rels) {
        PSet ys = target.succ(r, t.y);
        bool ok = for_each_successor_tuple(sources, r, t.xs, [&](const std::vector<int>& next) {
            bool found = false;
            for_each_bit(ys, [&](int y2) { found = found || in_z(ZTuple{next, y2}); });
            return found;
        });
        if (!ok) return false;
    }
    return true;
}

std::string show_tuple(const SimulationWitness& sw, const ZTuple& t) {
    std::string s = "(";
    for (std::size_t i = 0; i < t.xs.size(); ++i) s += (i ? "," : "") + sw.sources[i].name(t.xs[i]);
    return s + ")->" + sw.target.name(t.y);
}

} // namespace

SimulationCheck check_simulation(const SimulationWitness& sw) {
    check_shape(sw);
    SimulationCheck out;
    std::set<ZTuple> z(sw.z.begin(), sw.z.end());
    auto in_z = [&](const ZTuple& t) { return z.count(t) != 0; };
    auto note = [&](const std::string& d) {
        if (out.detail.empty()) out.detail = d;
    };

    ZTuple anchor;
    for (auto& gi : sw.g) anchor.xs.push_back(gi[sw.anchor]);
    anchor.y = sw.h[sw.anchor];
    if (!in_z(anchor)) {
        out.s1 = false;
        note("(s1) anchor tuple " + show_tuple(sw, anchor) + " is not in Z");
    }
    auto rels = union_relations(sw.sources, sw.target);
    for (auto& t : z)
        if (out.s2 && !s2_tuple(sw.sources, sw.target, rels, t, in_z)) {
            out.s2 = false;
            note("(s2) no matching step from " + show_tuple(sw, t));
        }
    for (auto& t : z)
        if (out.s3 && !s3_tuple(sw.g, sw.h, sw.tree.all(), t)) {
            out.s3 = false;
            note("(s3) tuple " + show_tuple(sw, t) + " is covered without its target point");
        }
    return out;
}

bool verify_simulation(const SimulationWitness& sw) { return check_simulation(sw).ok(); }

bool s3_exhaustive(const SimulationWitness& sw) {
    if (sw.tree.size() > 12) throw CapError("(s3) enumeration is limited to 12 tree points");
    for (PSet a = 0; a <= sw.tree.all(); ++a) {
        PSet himg = image(sw.h, a);
        std::vector<PSet> gimg;
        for (auto& gi : sw.g) gimg.push_back(image(gi, a));
        for (auto& t : sw.z) {
            bool covered = true;
            for (std::size_t i = 0; i < gimg.size() && covered; ++i) covered = has(gimg[i], t.xs[i]);
            if (covered && !has(himg, t.y)) return false;
        }
    }
    return true;
}

bool verify_pointwise(const std::vector<Frame>& sources, const std::vector<HomMap>& f, const Frame& g,
                      const std::vector<ZTuple>& z) {
    SimulationWitness sw{sources, f, g, g, {}, 0, z};
    for (int v = 0; v < g.size(); ++v) sw.h.push_back(v);
    for (int v = 0; v < g.size(); ++v) {
        sw.anchor = v;
        if (!verify_simulation(sw)) return false;
    }
    return true;
}

std::vector<Frame> labelled_trees(int max_points, const std::vector<Sym>& rels) {
    if (max_points < 1) return {};
    if (max_points > 8) throw CapError("tree enumeration is limited to 8 points");
    std::vector<Frame> out;
    std::set<std::string> seen;
    const int nrel = static_cast<int>(rels.size());
    for (int n = 1; n <= max_points; ++n) {
        // parent[i] < i and a label per non-root point, as one mixed-radix counter
        std::vector<int> parent(n, -1), label(n, 0);
        for (int i = 1; i < n; ++i) parent[i] = 0;
        if (n > 1 && nrel == 0) break;
        while (true) {
            std::vector<std::vector<int>> kids(n);
            for (int i = 1; i < n; ++i) kids[parent[i]].push_back(i);
            std::function<std::string(int)> canon = [&](int u) {
                std::vector<std::string> parts;
                for (int c : kids[u]) parts.push_back(std::to_string(label[c]) + canon(c));
                std::sort(parts.begin(), parts.end());
                return "(" + text::join(parts, "") + ")";
            };
            if (seen.insert(canon(0)).second) {
                Frame fr;
                for (int i = 0; i < n; ++i) fr.add_point("w" + std::to_string(i));
                for (Sym r : rels) fr.declare(r);
                for (int i = 1; i < n; ++i) fr.add_edge(rels[label[i]], parent[i], i);
                out.push_back(std::move(fr));
            }
            int i = n - 1;
            for (; i >= 1; --i) {
                if (++label[i] < nrel) break;
                label[i] = 0;
                if (++parent[i] < i) break;
                parent[i] = 0;
            }
            if (i < 1) break;
        }
    }
    return out;
}

namespace {

// Largest Z meeting (s2) and (s3) for fixed maps, as a sorted tuple list.
std::vector<ZTuple> greatest_z(const std::vector<Frame>& sources, const std::vector<HomMap>& g, const Frame& tree,
                               const Frame& target, const HomMap& h, const std::vector<Sym>& rels) {
    std::set<ZTuple> z;
    std::vector<int> xs(sources.size(), 0);
    std::function<void(std::size_t)> fill = [&](std::size_t i) {
        if (i == sources.size()) {
            for (int y = 0; y < target.size(); ++y) {
                ZTuple t{xs, y};
                if (s3_tuple(g, h, tree.all(), t)) z.insert(t);
            }
            return;
        }
        for (int x = 0; x < sources[i].size(); ++x) {
            xs[i] = x;
            fill(i + 1);
        }
    };
    fill(0);
    auto in_z = [&](const ZTuple& t) { return z.count(t) != 0; };
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto it = z.begin(); it != z.end();) {
            if (!s2_tuple(sources, target, rels, *it, in_z)) {
                it = z.erase(it);
                changed = true;
            } else {
                ++it;
            }
        }
    }
    return {z.begin(), z.end()};
}

struct TreeOutcome {
    long homs = 0;
    std::vector<SimulationWitness> found;
    std::optional<SimulationWitness> failure;
};

TreeOutcome search_tree(const std::vector<Frame>& sources, const Frame& target, const Frame& tree,
                        const std::vector<Sym>& rels) {
    TreeOutcome out;
    std::vector<std::vector<HomMap>> gs(sources.size());
    for (std::size_t i = 0; i < sources.size(); ++i)
        for_each_hom(tree, sources[i], {}, [&](const HomMap& m) {
            gs[i].push_back(m);
            return true;
        });
    for_each_hom(tree, target, {}, [&](const HomMap& h) {
        ++out.homs;
        SimulationWitness sw{sources, {}, tree, target, h, 0, {}};
        std::vector<HomMap> pick(sources.size());
        std::function<bool(std::size_t)> go = [&](std::size_t i) -> bool {
            if (i == sources.size()) {
                auto z = greatest_z(sources, pick, tree, target, h, rels);
                ZTuple anchor{{}, h[0]};
                for (auto& m : pick) anchor.xs.push_back(m[0]);
                if (!std::binary_search(z.begin(), z.end(), anchor)) return false;
                sw.g = pick;
                sw.z = std::move(z);
                return true;
            }
            for (auto& m : gs[i]) {
                pick[i] = m;
                if (go(i + 1)) return true;
            }
            return false;
        };
        if (go(0)) {
            out.found.push_back(std::move(sw));
            return true;
        }
        out.failure = std::move(sw);
        return false;
    });
    return out;
}

} // namespace

WitnessSearch search_witness(const std::vector<Frame>& sources, const Frame& g, int tree_bound) {
    if (tree_bound < 1) throw PreconditionError("search_witness: the tree bound must be positive");
    WitnessSearch out;
    out.bound = tree_bound;
    auto rels = union_relations(sources, g);
    auto trees = labelled_trees(tree_bound, rels);
    std::vector<std::future<TreeOutcome>> jobs;
    for (auto& t : trees)
        jobs.push_back(std::async(std::launch::async, [&, t] { return search_tree(sources, g, t, rels); }));
    for (auto& j : jobs) {
        auto r = j.get();
        ++out.trees;
        out.homs += r.homs;
        for (auto& w : r.found) out.witnesses.push_back(std::move(w));
        if (r.failure && !out.failure) out.failure = std::move(r.failure);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Witness files

namespace {

HomMap parse_map(const Frame& from, const Frame& to, const std::string& value, std::size_t offset) {
    HomMap m(from.size(), -1);
    for (auto& item : text::split(value, ",")) {
        auto arrow = item.find("->");
        if (arrow == std::string::npos) throw ParseError("map entries look like 'a->b'", offset);
        int a = from.find(text::trim(item.substr(0, arrow)));
        int b = to.find(text::trim(item.substr(arrow + 2)));
        if (a < 0 || b < 0) throw ParseError("unknown point in map entry '" + item + "'", offset);
        m[a] = b;
    }
    for (int v : m)
        if (v < 0) throw ParseError("map does not cover every point", offset);
    return m;
}

std::string render_map(const Frame& from, const Frame& to, const HomMap& m) {
    std::vector<std::string> parts;
    for (int p = 0; p < from.size(); ++p) parts.push_back(from.name(p) + "->" + to.name(m[p]));
    return text::join(parts, ", ");
}

} // namespace

WitnessFile parse_witness(const std::string& text) {
    WitnessFile out;
    auto& sw = out.witness;
    std::map<std::string, std::string> blocks;  // "source:<k>", "target", "tree"
    std::vector<std::pair<std::string, std::string>> entries;
    std::vector<std::size_t> entry_offsets;
    std::string current;
    std::size_t offset = 0;
    for (auto& raw : text::lines(text)) {
        std::string line(text::trim(raw.substr(0, raw.find('#'))));
        std::size_t here = offset;
        offset += raw.size() + 1;
        if (line.empty()) continue;
        auto words = text::split(line, " \t");
        if (words[0] == "source" && words.size() == 2) {
            out.source_names.push_back(words[1]);
            current = "source:" + std::to_string(out.source_names.size() - 1);
            continue;
        }
        if (line == "target" || line == "tree") {
            current = line;
            continue;
        }
        auto [key, value] = text::key_value(line);
        bool z_line = key == "Z" && text::trim(value).substr(0, 1) == "(";
        bool map_line = key == "h" || key == "anchor" ||
                        (key.size() > 1 && key[0] == 'g' &&
                         std::all_of(key.begin() + 1, key.end(), [](unsigned char c) { return std::isdigit(c); }));
        if (z_line || map_line) {
            entries.emplace_back(key, value);
            entry_offsets.push_back(here);
            current.clear();
            continue;
        }
        if (current.empty()) throw ParseError("line outside a frame block: '" + line + "'", here);
        blocks[current] += line + "\n";
    }
    for (std::size_t i = 0; i < out.source_names.size(); ++i)
        sw.sources.push_back(parse_frame(blocks["source:" + std::to_string(i)]));
    if (!blocks.count("target")) throw ParseError("missing target block", 0);
    sw.target = parse_frame(blocks["target"]);
    out.pointwise = !blocks.count("tree");
    sw.tree = out.pointwise ? sw.target : parse_frame(blocks["tree"]);
    sw.g.assign(sw.sources.size(), {});
    if (out.pointwise)
        for (int v = 0; v < sw.target.size(); ++v) sw.h.push_back(v);

    for (std::size_t e = 0; e < entries.size(); ++e) {
        const auto& [key, value] = entries[e];
        std::size_t at = entry_offsets[e];
        if (key == "Z") {
            std::string rest = value;
            std::size_t pos = 0;
            while ((pos = rest.find('(')) != std::string::npos) {
                auto close = rest.find(')', pos);
                auto arrow = rest.find("->", close);
                if (close == std::string::npos || arrow == std::string::npos)
                    throw ParseError("Z entries look like '(x,y)->v'", at);
                auto end = rest.find(',', arrow);
                ZTuple t;
                auto xs = text::split(rest.substr(pos + 1, close - pos - 1), ",");
                if (xs.size() != sw.sources.size()) throw ParseError("Z tuple of the wrong arity", at);
                for (std::size_t i = 0; i < xs.size(); ++i) {
                    int x = sw.sources[i].find(xs[i]);
                    if (x < 0) throw ParseError("unknown source point '" + xs[i] + "'", at);
                    t.xs.push_back(x);
                }
                std::string y(text::trim(rest.substr(arrow + 2, end == std::string::npos ? end : end - arrow - 2)));
                t.y = sw.target.find(y);
                if (t.y < 0) throw ParseError("unknown target point '" + y + "'", at);
                sw.z.push_back(t);
                rest = end == std::string::npos ? "" : rest.substr(end + 1);
            }
        } else if (key == "anchor") {
            sw.anchor = sw.tree.find(text::trim(value));
            if (sw.anchor < 0) throw ParseError("unknown anchor", at);
        } else if (key == "h") {
            sw.h = parse_map(sw.tree, sw.target, value, at);
        } else {
            std::size_t k = std::stoul(key.substr(1));
            if (k < 1 || k > sw.sources.size()) throw ParseError("no source for " + key, at);
            sw.g[k - 1] = parse_map(sw.tree, sw.sources[k - 1], value, at);
        }
    }
    for (std::size_t i = 0; i < sw.g.size(); ++i)
        if (sw.g[i].empty()) throw ParseError("missing map g" + std::to_string(i + 1), 0);
    if (sw.h.empty()) throw ParseError("missing map h", 0);
    return out;
}

std::string render_witness(const WitnessFile& w) {
    const auto& sw = w.witness;
    std::ostringstream out;
    for (std::size_t i = 0; i < sw.sources.size(); ++i) {
        std::string name = i < w.source_names.size() ? w.source_names[i] : "F" + std::to_string(i + 1);
        out << "source " << name << "\n" << render_frame(sw.sources[i]);
    }
    out << "target\n" << render_frame(sw.target);
    if (!w.pointwise) {
        out << "tree\n" << render_frame(sw.tree);
        out << "anchor: " << sw.tree.name(sw.anchor) << "\n";
        out << "h: " << render_map(sw.tree, sw.target, sw.h) << "\n";
    }
    std::vector<std::string> zs;
    for (auto& t : sw.z) zs.push_back(show_tuple(sw, t));
    out << "Z: " << text::join(zs, ", ") << "\n";
    for (std::size_t i = 0; i < sw.g.size(); ++i)
        out << "g" << i + 1 << ": " << render_map(sw.tree, sw.sources[i], sw.g[i]) << "\n";
    return out.str();
}

bool verify_witness_file(const WitnessFile& w) {
    if (w.pointwise) return verify_pointwise(w.witness.sources, w.witness.g, w.witness.target, w.witness.z);
    return verify_simulation(w.witness);
}

} // namespace spikit
