#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace cutpack {

using Vertex = int;

/// Subset of a fixed vertex universe {0, ..., n-1}.
///
/// Stored as a packed bitset, so iteration yields members in increasing
/// order and set algebra is word-parallel. Sets over different universes
/// must not be mixed.
class VertexSet {
public:
    VertexSet() = default;
    explicit VertexSet(int universe) : universe_(universe), words_(word_count(universe), 0) {}
    VertexSet(int universe, std::initializer_list<Vertex> members) : VertexSet(universe) {
        for (Vertex v : members) {
            insert(v);
        }
    }
    template <typename Range>
    static VertexSet from(int universe, const Range& members) {
        VertexSet s(universe);
        for (Vertex v : members) {
            s.insert(v);
        }
        return s;
    }
    static VertexSet full(int universe) {
        VertexSet s(universe);
        for (Vertex v = 0; v < universe; ++v) {
            s.insert(v);
        }
        return s;
    }

    int universe() const { return universe_; }

    bool contains(Vertex v) const {
        return v >= 0 && v < universe_ && ((words_[v >> 6] >> (v & 63)) & 1U) != 0;
    }
    void insert(Vertex v) {
        check(v);
        words_[v >> 6] |= (std::uint64_t{1} << (v & 63));
    }
    void erase(Vertex v) {
        check(v);
        words_[v >> 6] &= ~(std::uint64_t{1} << (v & 63));
    }

    int size() const {
        int total = 0;
        for (auto w : words_) {
            total += std::popcount(w);
        }
        return total;
    }
    bool empty() const {
        for (auto w : words_) {
            if (w != 0) {
                return false;
            }
        }
        return true;
    }
    bool is_full() const { return size() == universe_; }

    std::vector<Vertex> members() const {
        std::vector<Vertex> out;
        for (std::size_t i = 0; i < words_.size(); ++i) {
            auto w = words_[i];
            while (w != 0) {
                int bit = std::countr_zero(w);
                out.push_back(static_cast<Vertex>(i * 64 + bit));
                w &= w - 1;
            }
        }
        return out;
    }

    bool is_subset_of(const VertexSet& other) const {
        for (std::size_t i = 0; i < words_.size(); ++i) {
            if ((words_[i] & ~other.words_[i]) != 0) {
                return false;
            }
        }
        return true;
    }
    bool is_proper_subset_of(const VertexSet& other) const { return is_subset_of(other) && *this != other; }
    bool intersects(const VertexSet& other) const {
        for (std::size_t i = 0; i < words_.size(); ++i) {
            if ((words_[i] & other.words_[i]) != 0) {
                return true;
            }
        }
        return false;
    }

    VertexSet& operator&=(const VertexSet& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
        return *this;
    }
    VertexSet& operator|=(const VertexSet& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
        return *this;
    }
    VertexSet& operator-=(const VertexSet& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
        return *this;
    }
    friend VertexSet operator&(VertexSet a, const VertexSet& b) { return a &= b; }
    friend VertexSet operator|(VertexSet a, const VertexSet& b) { return a |= b; }
    friend VertexSet operator-(VertexSet a, const VertexSet& b) { return a -= b; }

    VertexSet complement() const {
        VertexSet s = full(universe_);
        s -= *this;
        return s;
    }

    friend bool operator==(const VertexSet&, const VertexSet&) = default;

    /// Total order: smaller sets first, then by packed words. Used only to make
    /// containers deterministic.
    friend std::strong_ordering operator<=>(const VertexSet& a, const VertexSet& b) {
        if (auto c = a.universe_ <=> b.universe_; c != 0) return c;
        if (auto c = a.size() <=> b.size(); c != 0) return c;
        for (std::size_t i = 0; i < a.words_.size(); ++i) {
            if (auto c = a.words_[i] <=> b.words_[i]; c != 0) return c;
        }
        return std::strong_ordering::equal;
    }

    std::size_t hash() const {
        std::size_t h = static_cast<std::size_t>(universe_);
        for (auto w : words_) {
            h ^= static_cast<std::size_t>(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }

private:
    static std::size_t word_count(int universe) {
        if (universe < 0) {
            throw std::invalid_argument("negative vertex universe");
        }
        return (static_cast<std::size_t>(universe) + 63) / 64;
    }
    void check(Vertex v) const {
        if (v < 0 || v >= universe_) {
            throw std::out_of_range("vertex out of range");
        }
    }

    int universe_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Two sets cross when their intersection and both differences are non-empty.
inline bool crosses(const VertexSet& a, const VertexSet& b) {
    return a.intersects(b) && !a.is_subset_of(b) && !b.is_subset_of(a);
}

/// No pair of sets crosses. Quadratic in the family size.
template <typename Range>
bool is_laminar(const Range& family) {
    std::vector<const VertexSet*> sets;
    for (const auto& s : family) {
        sets.push_back(&s);
    }
    for (std::size_t i = 0; i < sets.size(); ++i) {
        for (std::size_t j = i + 1; j < sets.size(); ++j) {
            if (crosses(*sets[i], *sets[j])) {
                return false;
            }
        }
    }
    return true;
}

struct VertexSetHash {
    std::size_t operator()(const VertexSet& s) const { return s.hash(); }
};

} // namespace cutpack
