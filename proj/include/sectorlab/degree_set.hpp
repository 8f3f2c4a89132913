#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sectorlab/errors.hpp"

namespace sectorlab {

/// A set A of nonnegative degrees: either a finite set or an upper tail {j : j >= t}.
class DegreeSet {
  public:
    /// The empty set.
    DegreeSet() = default;

    static DegreeSet tail(std::uint32_t t) {
        DegreeSet a;
        a.is_tail_ = true;
        a.threshold_ = t;
        return a;
    }

    static DegreeSet all() { return tail(0); }

    static DegreeSet finite(std::vector<std::uint32_t> values) {
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        DegreeSet a;
        a.values_ = std::move(values);
        return a;
    }

    bool is_tail() const { return is_tail_; }
    bool is_empty() const { return !is_tail_ && values_.empty(); }
    std::uint32_t threshold() const { return threshold_; }
    const std::vector<std::uint32_t>& values() const { return values_; }

    bool contains(std::uint64_t j) const {
        if (is_tail_) return j >= threshold_;
        return std::binary_search(values_.begin(), values_.end(), j);
    }

    /// "tail:t" or "set:a,b,c" ("set:" is the empty set).
    std::string to_string() const {
        if (is_tail_) return "tail:" + std::to_string(threshold_);
        std::string s = "set:";
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (i) s += ',';
            s += std::to_string(values_[i]);
        }
        return s;
    }

    static DegreeSet parse(std::string_view text) {
        auto number = [&](std::string_view tok) {
            std::uint32_t v = 0;
            const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc{} || p != tok.data() + tok.size())
                throw ConfigError("a_sets", "bad degree '" + std::string(tok) + "'");
            return v;
        };
        if (text == "all") return all();
        if (text == "empty") return {};
        if (text.starts_with("tail:")) return tail(number(text.substr(5)));
        if (text.starts_with("set:")) {
            std::vector<std::uint32_t> vals;
            std::string_view rest = text.substr(4);
            while (!rest.empty()) {
                const auto comma = rest.find(',');
                vals.push_back(number(rest.substr(0, comma)));
                if (comma == std::string_view::npos) break;
                rest.remove_prefix(comma + 1);
            }
            return finite(std::move(vals));
        }
        throw ConfigError("a_sets", "expected tail:t or set:a,b,... but got '" +
                                        std::string(text) + "'");
    }

    friend bool operator==(const DegreeSet&, const DegreeSet&) = default;

  private:
    bool is_tail_ = false;
    std::uint32_t threshold_ = 0;
    std::vector<std::uint32_t> values_;
};

}  // namespace sectorlab
